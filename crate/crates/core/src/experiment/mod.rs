//! Monte Carlo runs of the Gini index over generated drops, with percentile
//! readouts and comparison against published reference values.

mod output;
mod reference;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use output::{cdf_csv, cdf_svg, samples_csv, summary_json, SAMPLES_HEADER};
pub use reference::{compare_to_reference, Comparison, Gate, ReferenceTable};
pub use stats::{
    emit_cdf, percentiles, quantile_sorted, sorted_values, PercentileReport, MIN_REPORT_SAMPLES,
};

use crate::channel::{generate_drop, BandProfile, GenConfig};
use crate::error::{Error, Result};
use crate::gini::gini_realization;
use crate::types::{AllocationMode, Band, GiniSample, LosVariant};

/// One band and allocation mode over `drops` drops.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub profile: BandProfile,
    pub cfg: GenConfig,
    pub mode: AllocationMode,
    pub drops: usize,
    pub variants: Vec<LosVariant>,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl RunSpec {
    /// Both variants when the generator injects LoS, otherwise with-LoS only
    /// (which then means "all rays").
    pub fn new(profile: BandProfile, cfg: GenConfig, mode: AllocationMode, drops: usize) -> Self {
        let variants = if cfg.los {
            LosVariant::ALL.to_vec()
        } else {
            vec![LosVariant::WithLos]
        };
        RunSpec {
            profile,
            cfg,
            mode,
            drops,
            variants,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops == 0 {
            return Err(Error::invalid("drops", "must be >= 1"));
        }
        if self.variants.is_empty() {
            return Err(Error::invalid("variants", "must not be empty"));
        }
        if self.workers == Some(0) {
            return Err(Error::invalid("workers", "must be >= 1"));
        }
        self.profile.validate()?;
        self.cfg.validate()
    }
}

pub(crate) fn in_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid("workers", e.to_string()))?;
            Ok(pool.install(job))
        }
    }
}

/// Samples in drop order, variants in `spec.variants` order within a drop.
/// The stream depends only on `(master_seed, drops)`.
pub fn run_monte_carlo(spec: &RunSpec) -> Result<Vec<GiniSample>> {
    spec.validate()?;
    let per_drop: Vec<Result<Vec<GiniSample>>> = in_pool(spec.workers, || {
        (0..spec.drops as u64)
            .into_par_iter()
            .map(|d| {
                let r = generate_drop(&spec.profile, &spec.cfg, spec.mode, d)?;
                spec.variants
                    .iter()
                    .map(|v| gini_realization(&r, *v))
                    .collect()
            })
            .collect()
    })?;
    let mut out = Vec::with_capacity(spec.drops * spec.variants.len());
    for samples in per_drop {
        out.extend(samples?);
    }
    Ok(out)
}

/// A set of bands and modes run with one generator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub profiles: Vec<BandProfile>,
    pub modes: Vec<AllocationMode>,
    pub cfg: GenConfig,
    pub drops: usize,
    pub workers: Option<usize>,
}

impl SuiteSpec {
    /// All preset bands in both modes.
    pub fn presets(cfg: GenConfig, drops: usize) -> Self {
        SuiteSpec {
            profiles: BandProfile::presets().to_vec(),
            modes: AllocationMode::ALL.to_vec(),
            cfg,
            drops,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub band: Band,
    pub sample: GiniSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub master_seed: u64,
    pub drops: usize,
    pub rows: Vec<SampleRow>,
    /// Ordered by band, mode, variant.
    pub reports: Vec<PercentileReport>,
}

impl SuiteResult {
    pub fn report(
        &self,
        band: &Band,
        mode: AllocationMode,
        variant: LosVariant,
    ) -> Option<&PercentileReport> {
        self.reports
            .iter()
            .find(|r| &r.band == band && r.mode == mode && r.variant == variant)
    }

    /// Gated rows whose median falls outside tolerance.
    pub fn failed_gates(&self) -> Vec<&PercentileReport> {
        self.reports
            .iter()
            .filter(
                |r| matches!(&r.comparison, Some(Comparison { gate: Some(g), .. }) if !g.passed),
            )
            .collect()
    }

    pub fn gates_passed(&self) -> bool {
        self.failed_gates().is_empty()
    }

    /// Gini values of one `(band, mode, variant)` series in drop order.
    pub fn values(&self, band: &Band, mode: AllocationMode, variant: LosVariant) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| &r.band == band && r.sample.mode == mode && r.sample.variant == variant)
            .map(|r| r.sample.value)
            .collect()
    }
}

/// Runs every `(band, mode)` pair, reduces to percentiles and compares each
/// preset band against the simulated reference for its mode.
pub fn run_suite(spec: &SuiteSpec) -> Result<SuiteResult> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for profile in &spec.profiles {
        for &mode in &spec.modes {
            let run = RunSpec {
                workers: spec.workers,
                ..RunSpec::new(profile.clone(), spec.cfg.clone(), mode, spec.drops)
            };
            let samples = run_monte_carlo(&run)?;
            for &variant in &run.variants {
                let values: Vec<f64> = samples
                    .iter()
                    .filter(|s| s.variant == variant)
                    .map(|s| s.value)
                    .collect();
                let mut report = percentiles(&values, profile.band.clone(), mode, variant)?;
                let table = ReferenceTable::for_mode(mode);
                if table.row(&profile.band, variant).is_ok() {
                    report = report.compare(table)?;
                }
                reports.push(report);
            }
            rows.extend(samples.into_iter().map(|sample| SampleRow {
                band: profile.band.clone(),
                sample,
            }));
        }
    }
    Ok(SuiteResult {
        master_seed: spec.cfg.master_seed,
        drops: spec.drops,
        rows,
        reports,
    })
}
