//! Domain types shared across generation, extraction and analysis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency band a realization belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Band {
    CmWave,
    MmWave,
    SubThz,
    Custom(String),
}

impl From<Band> for String {
    fn from(b: Band) -> String {
        b.name().to_string()
    }
}

impl TryFrom<String> for Band {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl Band {
    pub const PRESETS: [Band; 3] = [Band::CmWave, Band::MmWave, Band::SubThz];

    pub fn name(&self) -> &str {
        match self {
            Band::CmWave => "cmWave",
            Band::MmWave => "mmWave",
            Band::SubThz => "subTHz",
            Band::Custom(name) => name,
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Band {
    type Err = Error;

    /// Preset names are matched case-insensitively; anything else that is a
    /// plain identifier becomes a custom band tag.
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cmwave" => Ok(Band::CmWave),
            "mmwave" => Ok(Band::MmWave),
            "subthz" | "sub-thz" => Ok(Band::SubThz),
            _ if !s.is_empty()
                && s.chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') =>
            {
                Ok(Band::Custom(s.to_string()))
            }
            _ => Err(Error::UnknownBand(s.to_string())),
        }
    }
}

/// How the power of a cluster is split across its rays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMode {
    /// Every ray gets `P_n / M`.
    Equal,
    /// One dominant ray per cluster, governed by the intra-cluster K-factor.
    Ick,
}

impl AllocationMode {
    pub const ALL: [AllocationMode; 2] = [AllocationMode::Equal, AllocationMode::Ick];

    pub fn name(self) -> &'static str {
        match self {
            AllocationMode::Equal => "equal",
            AllocationMode::Ick => "ick",
        }
    }
}

impl fmt::Display for AllocationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AllocationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "equal" => Ok(AllocationMode::Equal),
            "ick" => Ok(AllocationMode::Ick),
            _ => Err(Error::invalid(
                "mode",
                format!("`{s}` is not one of equal|ick"),
            )),
        }
    }
}

/// Whether the LoS ray takes part in a Gini evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosVariant {
    WithLos,
    WithoutLos,
}

impl LosVariant {
    pub const ALL: [LosVariant; 2] = [LosVariant::WithLos, LosVariant::WithoutLos];

    pub fn name(self) -> &'static str {
        match self {
            LosVariant::WithLos => "with_los",
            LosVariant::WithoutLos => "without_los",
        }
    }
}

impl fmt::Display for LosVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LosVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "with_los" => Ok(LosVariant::WithLos),
            "without_los" => Ok(LosVariant::WithoutLos),
            _ => Err(Error::invalid(
                "variant",
                format!("`{s}` is not one of with_los|without_los"),
            )),
        }
    }
}

/// One resolvable multipath component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    /// Excess delay in seconds.
    pub delay_s: f64,
    /// Linear power.
    pub power: f64,
    /// Azimuth of arrival, degrees in [-180, 180).
    pub aoa_az_deg: f64,
    /// Elevation of arrival, degrees.
    pub aoa_el_deg: f64,
    pub is_los: bool,
    /// Index of the generating cluster, when known.
    pub cluster: Option<usize>,
}

impl Ray {
    pub fn new(delay_s: f64, power: f64) -> Self {
        Ray {
            delay_s,
            power,
            aoa_az_deg: 0.0,
            aoa_el_deg: 0.0,
            is_los: false,
            cluster: None,
        }
    }

    pub fn with_angle(mut self, az_deg: f64, el_deg: f64) -> Self {
        self.aoa_az_deg = wrap_azimuth(az_deg);
        self.aoa_el_deg = el_deg;
        self
    }

    pub fn los(mut self) -> Self {
        self.is_los = true;
        self
    }

    pub fn in_cluster(mut self, cluster: usize) -> Self {
        self.cluster = Some(cluster);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::invalid(
                "power",
                format!("{} is not > 0", self.power),
            ));
        }
        if !(self.delay_s >= 0.0) || !self.delay_s.is_finite() {
            return Err(Error::invalid(
                "delay_s",
                format!("{} is not >= 0", self.delay_s),
            ));
        }
        Ok(())
    }
}

/// Wrap an azimuth into [-180, 180).
pub fn wrap_azimuth(az_deg: f64) -> f64 {
    let wrapped = (az_deg + 180.0).rem_euclid(360.0) - 180.0;
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// Positive linear powers in ascending order. Only [`crate::gini::sort_ascending`]
/// builds one, so the ordering and positivity hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector(pub(crate) Vec<f64>);

impl PowerVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `‖p‖₁`
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// A group of rays treated as one entity with aggregate power.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    rays: Vec<Ray>,
    power: f64,
}

impl Cluster {
    pub fn new(rays: Vec<Ray>) -> Result<Self> {
        if rays.is_empty() {
            return Err(Error::invalid("rays", "cluster needs at least one ray"));
        }
        let power = rays.iter().map(|r| r.power).sum();
        Ok(Cluster { rays, power })
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn powers(&self) -> Vec<f64> {
        self.rays.iter().map(|r| r.power).collect()
    }

    pub fn into_rays(self) -> Vec<Ray> {
        self.rays
    }
}

/// One drop: the full ray list plus generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub rays: Vec<Ray>,
    pub band: Band,
    pub has_los: bool,
    pub seed: u64,
    pub drop_index: u64,
    pub mode: AllocationMode,
}

impl ChannelRealization {
    /// Checks ray validity and that `has_los` matches exactly one flagged ray.
    pub fn validate(&self) -> Result<()> {
        for ray in &self.rays {
            ray.validate()?;
        }
        let flagged = self.rays.iter().filter(|r| r.is_los).count();
        match (self.has_los, flagged) {
            (true, 1) | (false, 0) => Ok(()),
            _ => Err(Error::invalid(
                "has_los",
                format!(
                    "has_los = {} but {flagged} ray(s) are flagged LoS",
                    self.has_los
                ),
            )),
        }
    }

    pub fn powers(&self) -> Vec<f64> {
        self.rays.iter().map(|r| r.power).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.rays.iter().map(|r| r.power).sum()
    }

    pub fn los_ray(&self) -> Option<&Ray> {
        self.rays.iter().find(|r| r.is_los)
    }
}

/// One Gini value tagged with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniSample {
    pub value: f64,
    pub drop_index: u64,
    pub variant: LosVariant,
    pub mode: AllocationMode,
}
