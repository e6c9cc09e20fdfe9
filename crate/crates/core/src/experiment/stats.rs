use serde::{Deserialize, Serialize};

use super::reference::{Comparison, ReferenceTable};
use crate::error::{Error, Result};
use crate::types::{AllocationMode, Band, LosVariant};

/// Quantile of ascending `sorted` by linear interpolation between order
/// statistics: position `h = (n − 1)·q`, value
/// `x[⌊h⌋] + (h − ⌊h⌋)·(x[⌊h⌋+1] − x[⌊h⌋])`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid("q", format!("{q} is outside [0, 1]")));
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn sorted_values(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Below this many samples percentiles are reported with a warning.
pub const MIN_REPORT_SAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentileReport {
    pub band: Band,
    pub mode: AllocationMode,
    pub variant: LosVariant,
    pub p20: f64,
    pub p50: f64,
    pub p80: f64,
    pub n_drops: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison: Option<Comparison>,
}

impl PercentileReport {
    pub fn low_sample_count(&self) -> bool {
        self.n_drops < MIN_REPORT_SAMPLES
    }

    pub fn quantiles(&self) -> [f64; 3] {
        [self.p20, self.p50, self.p80]
    }

    /// Attaches the comparison against `table`.
    pub fn compare(mut self, table: ReferenceTable) -> Result<Self> {
        self.comparison = Some(super::reference::compare_to_reference(&self, table)?);
        Ok(self)
    }
}

/// 20/50/80 % readouts of `values`.
pub fn percentiles(
    values: &[f64],
    band: Band,
    mode: AllocationMode,
    variant: LosVariant,
) -> Result<PercentileReport> {
    let sorted = sorted_values(values);
    Ok(PercentileReport {
        band,
        mode,
        variant,
        p20: quantile_sorted(&sorted, 0.2)?,
        p50: quantile_sorted(&sorted, 0.5)?,
        p80: quantile_sorted(&sorted, 0.8)?,
        n_drops: values.len(),
        comparison: None,
    })
}

/// Empirical CDF points `(x₍ᵢ₎, (i − ½)/n)`.
pub fn emit_cdf(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len() as f64;
    sorted_values(values)
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, (i as f64 + 0.5) / n))
        .collect()
}
