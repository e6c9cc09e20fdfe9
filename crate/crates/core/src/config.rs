//! TOML run configuration. Every field has a default, so an empty file (or
//! no file) runs all preset bands in both allocation modes.
//!
//! ```toml
//! [run]
//! bands = ["cmWave", "mmWave", "subTHz"]
//! modes = ["equal", "ick"]
//! drops = 10000
//! workers = 0          # 0 = one per core
//! out = "out"
//!
//! [generator]
//! master_seed = 0
//! m_rays = 20
//! r_tau = 3.6
//! zeta_db = 6.0
//!
//! [emit]
//! csv = true
//! summary = true
//! cdf = false
//! svg = false
//!
//! [profile.subTHz]     # override fields of a preset, or define a new band
//! n_clusters = 4
//!
//! [sounder]
//! noise_floor_db = -25.0
//!
//! [theory]
//! cases = 10000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{BandProfile, GenConfig};
use crate::error::{Error, Result};
use crate::extract::{KMeansParams, SounderModel};
use crate::formats::read_text;
use crate::types::{AllocationMode, Band};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub bands: Vec<String>,
    pub modes: Vec<AllocationMode>,
    pub drops: usize,
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
    pub out: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            bands: Band::PRESETS.iter().map(|b| b.name().to_string()).collect(),
            modes: AllocationMode::ALL.to_vec(),
            drops: 10_000,
            workers: 0,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitSection {
    pub csv: bool,
    pub summary: bool,
    pub cdf: bool,
    pub svg: bool,
}

impl Default for EmitSection {
    fn default() -> Self {
        EmitSection {
            csv: true,
            summary: true,
            cdf: false,
            svg: false,
        }
    }
}

/// Per-band overrides. A band that is not a preset must set every field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileOverride {
    pub ds_log10_mu: Option<f64>,
    pub ds_log10_sigma: Option<f64>,
    pub k_mu_db: Option<f64>,
    pub k_sigma_db: Option<f64>,
    pub n_clusters: Option<usize>,
    pub ick_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SounderSection {
    /// Preset horn and bandwidth; the remaining fields override it.
    pub band: String,
    pub beamwidth_az_3db_deg: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub noise_floor_db: f64,
    pub noise_db: Option<f64>,
    pub window_s: Option<f64>,
    pub pretrigger_bins: Option<usize>,
    /// Fixed cluster count; elbow selection when absent.
    pub target_k: Option<usize>,
    pub max_k: usize,
    pub elbow_threshold: f64,
    pub restarts: usize,
}

impl Default for SounderSection {
    fn default() -> Self {
        let k = KMeansParams::default();
        SounderSection {
            band: Band::SubThz.name().to_string(),
            beamwidth_az_3db_deg: None,
            bandwidth_hz: None,
            noise_floor_db: -25.0,
            noise_db: None,
            window_s: None,
            pretrigger_bins: None,
            target_k: None,
            max_k: k.max_k,
            elbow_threshold: k.elbow_threshold,
            restarts: k.restarts,
        }
    }
}

impl SounderSection {
    pub fn model(&self) -> Result<SounderModel> {
        let band: Band = self.band.parse()?;
        let mut sm = SounderModel::for_band(&band);
        if let Some(b) = self.beamwidth_az_3db_deg {
            sm.beamwidth_az_3db_deg = b;
        }
        if let Some(b) = self.bandwidth_hz {
            sm.bandwidth_hz = b;
        }
        if let Some(w) = self.window_s {
            sm.window_s = w;
        }
        if let Some(b) = self.pretrigger_bins {
            sm.pretrigger_bins = b;
        }
        sm.noise_floor_db = self.noise_floor_db;
        sm.noise_db = self.noise_db;
        sm.validate()?;
        Ok(sm)
    }

    pub fn kmeans(&self, seed: u64) -> KMeansParams {
        KMeansParams {
            max_k: self.max_k,
            elbow_threshold: self.elbow_threshold,
            restarts: self.restarts,
            seed,
            ..KMeansParams::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheorySection {
    pub cases: usize,
}

impl Default for TheorySection {
    fn default() -> Self {
        TheorySection { cases: 10_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub generator: GenConfig,
    pub emit: EmitSection,
    pub profile: BTreeMap<String, ProfileOverride>,
    pub sounder: SounderSection,
    pub theory: TheorySection,
}

impl RunConfig {
    pub fn from_toml(path: &Path, text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            field: "config".into(),
            reason: e.message().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(path, &read_text(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    /// Checks everything a run would touch before the run starts.
    pub fn validate(&self) -> Result<()> {
        if self.run.drops == 0 {
            return Err(Error::invalid("drops", "must be >= 1"));
        }
        if self.run.bands.is_empty() {
            return Err(Error::invalid("bands", "must not be empty"));
        }
        if self.run.modes.is_empty() {
            return Err(Error::invalid("modes", "must not be empty"));
        }
        self.generator.validate()?;
        self.profiles()?;
        self.sounder.model()?;
        Ok(())
    }

    /// Profiles of the selected bands with overrides applied.
    pub fn profiles(&self) -> Result<Vec<BandProfile>> {
        self.run
            .bands
            .iter()
            .map(|name| self.profile_for(name))
            .collect()
    }

    pub fn profile_for(&self, name: &str) -> Result<BandProfile> {
        let band: Band = name.parse()?;
        let over = self
            .profile
            .iter()
            .find(|(k, _)| k.parse::<Band>().ok().as_ref() == Some(&band))
            .map(|(_, v)| v.clone())
            .unwrap_or_default();
        let base = BandProfile::preset(&band);
        let missing = |field: &'static str| {
            Error::invalid(
                field,
                format!("band `{band}` is not a preset; set [profile.{band}] {field}"),
            )
        };
        let pick =
            |v: Option<f64>, base: Option<f64>, field| v.or(base).ok_or_else(|| missing(field));
        let p = BandProfile {
            band: band.clone(),
            ds_log10_mu: pick(
                over.ds_log10_mu,
                base.as_ref().map(|b| b.ds_log10_mu),
                "ds_log10_mu",
            )?,
            ds_log10_sigma: pick(
                over.ds_log10_sigma,
                base.as_ref().map(|b| b.ds_log10_sigma),
                "ds_log10_sigma",
            )?,
            k_mu_db: pick(over.k_mu_db, base.as_ref().map(|b| b.k_mu_db), "k_mu_db")?,
            k_sigma_db: pick(
                over.k_sigma_db,
                base.as_ref().map(|b| b.k_sigma_db),
                "k_sigma_db",
            )?,
            n_clusters: over
                .n_clusters
                .or(base.as_ref().map(|b| b.n_clusters))
                .ok_or_else(|| missing("n_clusters"))?,
            ick_db: pick(over.ick_db, base.as_ref().map(|b| b.ick_db), "ick_db")?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn workers(&self) -> Option<usize> {
        (self.run.workers > 0).then_some(self.run.workers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> &'static Path {
        Path::new("run.toml")
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml(path(), "").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.profiles().unwrap(), BandProfile::presets().to_vec());
        assert_eq!(cfg.run.drops, 10_000);
        assert_eq!(cfg.workers(), None);
    }

    #[test]
    fn overrides_apply() {
        let text = r#"
            [run]
            bands = ["subTHz"]
            modes = ["ick"]
            drops = 50
            [generator]
            master_seed = 9
            r_tau = 2.5
            [profile.subthz]
            n_clusters = 4
        "#;
        let cfg = RunConfig::from_toml(path(), text).unwrap();
        let p = cfg.profiles().unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].n_clusters, 4);
        assert_eq!(p[0].ick_db, 17.99);
        assert_eq!(cfg.generator.master_seed, 9);
        assert_eq!(cfg.generator.r_tau, 2.5);
    }

    #[test]
    fn custom_band_needs_every_field() {
        let text = r#"
            [run]
            bands = ["hall"]
            [profile.hall]
            ds_log10_mu = -7.0
        "#;
        assert!(RunConfig::from_toml(path(), text).is_err());
        let text = r#"
            [run]
            bands = ["hall"]
            [profile.hall]
            ds_log10_mu = -7.0
            ds_log10_sigma = 0.3
            k_mu_db = 3.0
            k_sigma_db = 2.0
            n_clusters = 5
            ick_db = 6.0
        "#;
        let cfg = RunConfig::from_toml(path(), text).unwrap();
        assert_eq!(cfg.profiles().unwrap()[0].band, Band::Custom("hall".into()));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            RunConfig::from_toml(path(), "[run]\ndrop = 3\n"),
            Err(Error::Parse { .. })
        ));
        assert!(RunConfig::from_toml(path(), "[run]\ndrops = 0\n").is_err());
        assert!(RunConfig::from_toml(path(), "[generator]\nm_rays = 1\n").is_err());
        assert!(RunConfig::from_toml(path(), "[run]\nbands = [\"bad band\"]\n").is_err());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.generator.ick_db = Some(12.0);
        cfg.profile.insert(
            "cmWave".into(),
            ProfileOverride {
                n_clusters: Some(7),
                ..Default::default()
            },
        );
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(path(), &text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), text);
    }
}
