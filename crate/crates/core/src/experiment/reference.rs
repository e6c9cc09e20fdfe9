//! Published 20/50/80 % Gini readouts used as comparison targets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::stats::PercentileReport;
use crate::error::{Error, Result};
use crate::types::{AllocationMode, Band, LosVariant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceTable {
    /// Indoor-office measurements at 6, 26 and 132 GHz. Reference only.
    Measured,
    /// Stochastic model with equal intra-cluster power.
    Baseline,
    /// Stochastic model with the ICK allocation.
    IckModel,
}

impl ReferenceTable {
    pub const ALL: [ReferenceTable; 3] = [
        ReferenceTable::Measured,
        ReferenceTable::Baseline,
        ReferenceTable::IckModel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReferenceTable::Measured => "measured",
            ReferenceTable::Baseline => "baseline",
            ReferenceTable::IckModel => "ick_model",
        }
    }

    /// The simulated table that corresponds to an allocation mode.
    pub fn for_mode(mode: AllocationMode) -> Self {
        match mode {
            AllocationMode::Equal => ReferenceTable::Baseline,
            AllocationMode::Ick => ReferenceTable::IckModel,
        }
    }

    /// `[p20, p50, p80]` for a row.
    pub fn row(self, band: &Band, variant: LosVariant) -> Result<[f64; 3]> {
        use LosVariant::*;
        let row = match (self, band, variant) {
            (ReferenceTable::Measured, Band::CmWave, WithLos) => [0.89, 0.92, 0.94],
            (ReferenceTable::Measured, Band::MmWave, WithLos) => [0.91, 0.95, 0.96],
            (ReferenceTable::Measured, Band::SubThz, WithLos) => [0.96, 0.98, 0.98],
            (ReferenceTable::Measured, Band::CmWave, WithoutLos) => [0.58, 0.61, 0.68],
            (ReferenceTable::Measured, Band::MmWave, WithoutLos) => [0.65, 0.73, 0.79],
            (ReferenceTable::Measured, Band::SubThz, WithoutLos) => [0.74, 0.80, 0.82],
            (ReferenceTable::Baseline, Band::CmWave, WithLos) => [0.78, 0.83, 0.86],
            (ReferenceTable::Baseline, Band::MmWave, WithLos) => [0.76, 0.82, 0.85],
            (ReferenceTable::Baseline, Band::SubThz, WithLos) => [0.36, 0.49, 0.61],
            (ReferenceTable::Baseline, Band::CmWave, WithoutLos) => [0.50, 0.61, 0.68],
            (ReferenceTable::Baseline, Band::MmWave, WithoutLos) => [0.48, 0.58, 0.67],
            (ReferenceTable::Baseline, Band::SubThz, WithoutLos) => [0.32, 0.48, 0.61],
            (ReferenceTable::IckModel, Band::CmWave, WithLos) => [0.89, 0.92, 0.93],
            (ReferenceTable::IckModel, Band::MmWave, WithLos) => [0.92, 0.94, 0.96],
            (ReferenceTable::IckModel, Band::SubThz, WithLos) => [0.96, 0.97, 0.98],
            (ReferenceTable::IckModel, Band::CmWave, WithoutLos) => [0.57, 0.64, 0.68],
            (ReferenceTable::IckModel, Band::MmWave, WithoutLos) => [0.75, 0.77, 0.79],
            (ReferenceTable::IckModel, Band::SubThz, WithoutLos) => [0.80, 0.83, 0.87],
            _ => {
                return Err(Error::UnknownReferenceRow(format!(
                    "{} / {} / {}",
                    self.name(),
                    band,
                    variant.name()
                )))
            }
        };
        Ok(row)
    }

    /// Tolerance on the median for rows that gate a run. Measured rows never
    /// gate.
    pub fn p50_gate(self, band: &Band, variant: LosVariant) -> Option<f64> {
        use LosVariant::*;
        match (self, band, variant) {
            (ReferenceTable::IckModel, Band::SubThz, WithLos) => Some(0.02),
            (ReferenceTable::IckModel, Band::MmWave, WithLos) => Some(0.03),
            (ReferenceTable::IckModel, Band::CmWave, WithLos) => Some(0.03),
            (ReferenceTable::IckModel, Band::SubThz, WithoutLos) => Some(0.05),
            (ReferenceTable::Baseline, Band::SubThz | Band::CmWave | Band::MmWave, WithLos) => {
                Some(0.08)
            }
            _ => None,
        }
    }
}

impl fmt::Display for ReferenceTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReferenceTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReferenceTable::ALL
            .into_iter()
            .find(|t| t.name() == s.to_ascii_lowercase().replace('-', "_"))
            .ok_or_else(|| Error::invalid("table", format!("unknown reference table `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub table: ReferenceTable,
    /// `[p20, p50, p80]` of the reference row.
    pub reference: [f64; 3],
    /// Simulated minus reference, per quantile.
    pub deltas: [f64; 3],
    /// Present when the row gates the median.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gate: Option<Gate>,
}

pub fn compare_to_reference(
    report: &PercentileReport,
    table: ReferenceTable,
) -> Result<Comparison> {
    let reference = table.row(&report.band, report.variant)?;
    let sim = report.quantiles();
    let deltas = [
        sim[0] - reference[0],
        sim[1] - reference[1],
        sim[2] - reference[2],
    ];
    let gate = table
        .p50_gate(&report.band, report.variant)
        .map(|tolerance| Gate {
            tolerance,
            passed: deltas[1].abs() <= tolerance,
        });
    Ok(Comparison {
        table,
        reference,
        deltas,
        gate,
    })
}
