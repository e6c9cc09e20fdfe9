//! Plain-text drop and CIR files.
//!
//! A drop file is a versioned header followed by one tab-separated record per
//! ray:
//!
//! ```text
//! # chansparse drop v1
//! seed	42
//! band	subTHz
//! mode	ick
//! drop_index	0
//! delay_s	power	aoa_az_deg	aoa_el_deg	is_los	cluster
//! 0e0	9.1e-1	0e0	0e0	1	0
//! ```
//!
//! `cluster` is `-` for rays without a cluster label. A CIR file holds one
//! block per antenna pointing:
//!
//! ```text
//! # chansparse cir v1
//! sample_interval_s	8.333333333333334e-10
//! pointing	-180e0	-10e0
//! 0e0	0e0
//! ...
//! ```
//!
//! with one `re im` tap per line. Floats are written in shortest round-trip
//! exponent form so reading and rewriting a file reproduces it byte for byte.

// The examples above show real tab-separated records.
#![allow(clippy::tabs_in_doc_comments)]

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extract::Cir;
use crate::types::{AllocationMode, Band, ChannelRealization, Ray};

pub const DROP_MAGIC: &str = "# chansparse drop v1";
pub const CIR_MAGIC: &str = "# chansparse cir v1";
const RAY_COLUMNS: &str = "delay_s\tpower\taoa_az_deg\taoa_el_deg\tis_los\tcluster";

pub fn write_drop(r: &ChannelRealization) -> String {
    let mut out = String::with_capacity(64 * (r.rays.len() + 6));
    let _ = writeln!(out, "{DROP_MAGIC}");
    let _ = writeln!(out, "seed\t{}", r.seed);
    let _ = writeln!(out, "band\t{}", r.band);
    let _ = writeln!(out, "mode\t{}", r.mode.name());
    let _ = writeln!(out, "drop_index\t{}", r.drop_index);
    let _ = writeln!(out, "{RAY_COLUMNS}");
    for ray in &r.rays {
        let cluster = ray
            .cluster
            .map_or_else(|| "-".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "{:e}\t{:e}\t{:e}\t{:e}\t{}\t{}",
            ray.delay_s,
            ray.power,
            ray.aoa_az_deg,
            ray.aoa_el_deg,
            u8::from(ray.is_los),
            cluster
        );
    }
    out
}

struct Lines<'a> {
    path: &'a Path,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        Lines {
            path,
            inner: text.lines().enumerate(),
        }
    }

    fn err(&self, field: impl Into<String>, reason: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            field: field.into(),
            reason: reason.into(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| self.err(what, "unexpected end of file"))
    }

    /// Reads a `key<TAB>value` header line.
    fn header(&mut self, key: &str) -> Result<&'a str> {
        let (_, line) = self.next_line(key)?;
        match line.split_once('\t') {
            Some((k, v)) if k == key => Ok(v),
            _ => Err(self.err(key, format!("expected `{key}<TAB>value`, found `{line}`"))),
        }
    }
}

fn parse<T: FromStr>(lines: &Lines, field: &str, text: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    text.parse::<T>()
        .map_err(|e| lines.err(field, format!("`{text}`: {e}")))
}

pub fn read_drop(path: &Path, text: &str) -> Result<ChannelRealization> {
    let mut lines = Lines::new(path, text);
    let (_, magic) = lines.next_line("header")?;
    if magic != DROP_MAGIC {
        return Err(lines.err("header", format!("expected `{DROP_MAGIC}`")));
    }
    let seed: u64 = {
        let v = lines.header("seed")?;
        parse(&lines, "seed", v)?
    };
    let band: Band = {
        let v = lines.header("band")?;
        parse(&lines, "band", v)?
    };
    let mode: AllocationMode = {
        let v = lines.header("mode")?;
        parse(&lines, "mode", v)?
    };
    let drop_index: u64 = {
        let v = lines.header("drop_index")?;
        parse(&lines, "drop_index", v)?
    };
    let (_, columns) = lines.next_line("columns")?;
    if columns != RAY_COLUMNS {
        return Err(lines.err(
            "columns",
            format!("expected `{}`", RAY_COLUMNS.replace('\t', " ")),
        ));
    }
    let mut rays = Vec::new();
    while let Some((n, line)) = lines.inner.next() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let at = |name: &str| format!("line {}: {name}", n + 1);
        if cols.len() != 6 {
            return Err(lines.err(
                at("record"),
                format!("expected 6 columns, found {}", cols.len()),
            ));
        }
        let is_los = match cols[4] {
            "0" => false,
            "1" => true,
            other => {
                return Err(lines.err(at("is_los"), format!("expected 0 or 1, found `{other}`")))
            }
        };
        let cluster = match cols[5] {
            "-" => None,
            c => Some(parse::<usize>(&lines, &at("cluster"), c)?),
        };
        let ray = Ray {
            delay_s: parse(&lines, &at("delay_s"), cols[0])?,
            power: parse(&lines, &at("power"), cols[1])?,
            aoa_az_deg: parse(&lines, &at("aoa_az_deg"), cols[2])?,
            aoa_el_deg: parse(&lines, &at("aoa_el_deg"), cols[3])?,
            is_los,
            cluster,
        };
        ray.validate()
            .map_err(|e| lines.err(at("record"), e.to_string()))?;
        rays.push(ray);
    }
    if rays.is_empty() {
        return Err(lines.err("records", "no rays"));
    }
    let has_los = rays.iter().any(|r| r.is_los);
    let r = ChannelRealization {
        rays,
        band,
        has_los,
        seed,
        drop_index,
        mode,
    };
    r.validate()
        .map_err(|e| lines.err("is_los", e.to_string()))?;
    Ok(r)
}

pub fn write_cirs(cirs: &[Cir]) -> Result<String> {
    let dt = cirs
        .first()
        .ok_or_else(|| Error::invalid("cirs", "need at least one CIR"))?
        .sample_interval_s;
    if cirs.iter().any(|c| c.sample_interval_s != dt) {
        return Err(Error::invalid(
            "cirs",
            "CIRs must share one sample interval",
        ));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{CIR_MAGIC}");
    let _ = writeln!(out, "sample_interval_s\t{dt:e}");
    for c in cirs {
        let _ = writeln!(out, "pointing\t{:e}\t{:e}", c.az_deg, c.el_deg);
        for t in &c.taps {
            let _ = writeln!(out, "{:e}\t{:e}", t.re, t.im);
        }
    }
    Ok(out)
}

pub fn read_cirs(path: &Path, text: &str) -> Result<Vec<Cir>> {
    let mut lines = Lines::new(path, text);
    let (_, magic) = lines.next_line("header")?;
    if magic != CIR_MAGIC {
        return Err(lines.err("header", format!("expected `{CIR_MAGIC}`")));
    }
    let dt: f64 = {
        let v = lines.header("sample_interval_s")?;
        parse(&lines, "sample_interval_s", v)?
    };
    if !(dt > 0.0) {
        return Err(lines.err("sample_interval_s", "must be > 0"));
    }
    let mut cirs: Vec<Cir> = Vec::new();
    while let Some((n, line)) = lines.inner.next() {
        if line.is_empty() {
            continue;
        }
        let at = |name: &str| format!("line {}: {name}", n + 1);
        let cols: Vec<&str> = line.split('\t').collect();
        if cols[0] == "pointing" {
            if cols.len() != 3 {
                return Err(lines.err(at("pointing"), "expected `pointing<TAB>az<TAB>el`"));
            }
            cirs.push(Cir {
                taps: Vec::new(),
                sample_interval_s: dt,
                az_deg: parse(&lines, &at("az"), cols[1])?,
                el_deg: parse(&lines, &at("el"), cols[2])?,
            });
            continue;
        }
        if cols.len() != 2 {
            return Err(lines.err(
                at("tap"),
                format!("expected 2 columns, found {}", cols.len()),
            ));
        }
        let tap = Complex64::new(
            parse(&lines, &at("re"), cols[0])?,
            parse(&lines, &at("im"), cols[1])?,
        );
        match cirs.last_mut() {
            Some(c) => c.taps.push(tap),
            None => return Err(lines.err(at("tap"), "tap before the first pointing")),
        }
    }
    if cirs.is_empty() {
        return Err(lines.err("pointing", "no pointings"));
    }
    if let Some(c) = cirs.iter().find(|c| c.taps.is_empty()) {
        return Err(lines.err(
            "tap",
            format!("pointing ({}, {}) has no taps", c.az_deg, c.el_deg),
        ));
    }
    Ok(cirs)
}

/// Either kind of input file, told apart by the first line.
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    Drop(ChannelRealization),
    Cirs(Vec<Cir>),
}

pub fn read_input(path: &Path) -> Result<InputFile> {
    let text = read_text(path)?;
    match text.lines().next() {
        Some(DROP_MAGIC) => read_drop(path, &text).map(InputFile::Drop),
        Some(CIR_MAGIC) => read_cirs(path, &text).map(InputFile::Cirs),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            field: "header".into(),
            reason: format!("expected `{DROP_MAGIC}` or `{CIR_MAGIC}`"),
        }),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_drop, BandProfile, GenConfig};
    use crate::extract::{synthesize_measurement, SounderModel};
    use crate::rng::aux_rng;

    fn p() -> &'static Path {
        Path::new("drop_0.txt")
    }

    #[test]
    fn drop_round_trip_is_byte_identical() {
        for mode in AllocationMode::ALL {
            let r =
                generate_drop(&BandProfile::mm_wave(), &GenConfig::with_seed(17), mode, 3).unwrap();
            let text = write_drop(&r);
            let back = read_drop(p(), &text).unwrap();
            assert_eq!(back, r);
            assert_eq!(write_drop(&back), text);
        }
    }

    #[test]
    fn drop_header_layout() {
        let r = generate_drop(
            &BandProfile::sub_thz(),
            &GenConfig::with_seed(42),
            AllocationMode::Ick,
            0,
        )
        .unwrap();
        let text = write_drop(&r);
        let head: Vec<&str> = text.lines().take(6).collect();
        assert_eq!(head[0], DROP_MAGIC);
        assert_eq!(head[1], "seed\t42");
        assert_eq!(head[2], "band\tsubTHz");
        assert_eq!(head[3], "mode\tick");
        assert_eq!(head[4], "drop_index\t0");
        assert_eq!(head[5], RAY_COLUMNS);
    }

    #[test]
    fn malformed_drop_names_field() {
        let r = generate_drop(
            &BandProfile::cm_wave(),
            &GenConfig::with_seed(1),
            AllocationMode::Equal,
            0,
        )
        .unwrap();
        let text = write_drop(&r).replacen("\t1\t0\n", "\tyes\t0\n", 1);
        let err = read_drop(p(), &text).unwrap_err();
        match err {
            Error::Parse { path, field, .. } => {
                assert_eq!(path, p());
                assert!(field.ends_with("is_los"), "{field}");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_drop(p(), "nonsense"),
            Err(Error::Parse { .. })
        ));
        let bad_band = write_drop(&r).replace("band\tcmWave", "band\tcm wave");
        assert!(
            matches!(read_drop(p(), &bad_band), Err(Error::Parse { field, .. }) if field == "band")
        );
    }

    #[test]
    fn cir_round_trip() {
        let sm = SounderModel {
            noise_db: Some(-30.0),
            window_s: 20e-9,
            ..SounderModel::for_band(&crate::types::Band::SubThz)
        };
        let cirs = synthesize_measurement(&[Ray::new(4e-9, 1.0)], &sm, &mut aux_rng(2, 2)).unwrap();
        let text = write_cirs(&cirs).unwrap();
        let back = read_cirs(p(), &text).unwrap();
        assert_eq!(back, cirs);
        assert_eq!(write_cirs(&back).unwrap(), text);
        assert!(read_cirs(
            p(),
            &format!("{CIR_MAGIC}\nsample_interval_s\t1e-9\n1e0\t0e0\n")
        )
        .is_err());
    }
}
