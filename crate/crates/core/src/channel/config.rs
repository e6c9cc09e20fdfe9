use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where the LoS specular power goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosInjection {
    /// Specular power is added to the first cluster's power before
    /// intra-cluster allocation; ray 1 of that cluster is flagged LoS.
    #[default]
    Fold,
    /// Specular power becomes one extra flagged ray at delay 0, next to the
    /// K-scaled cluster rays.
    Separate,
}

/// Generator settings shared by every band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    /// Rays per cluster.
    pub m_rays: usize,
    /// Delay scaling factor.
    pub r_tau: f64,
    /// Per-cluster shadowing standard deviation, dB.
    pub zeta_db: f64,
    pub master_seed: u64,
    /// Doppler shifts are drawn uniformly from this interval, Hz.
    pub doppler_hz_range: (f64, f64),
    /// Generate LoS drops (K-factor applied).
    pub los: bool,
    pub los_injection: LosInjection,
    /// Overrides the band's reference ICK, dB.
    pub ick_db: Option<f64>,
    /// Spread of a per-cluster ICK drawn around the band value, dB. Zero keeps
    /// one ICK for every cluster.
    pub ick_sigma_db: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            m_rays: 20,
            r_tau: 3.6,
            zeta_db: 6.0,
            master_seed: 0,
            doppler_hz_range: (0.0, 0.0),
            los: true,
            los_injection: LosInjection::Fold,
            ick_db: None,
            ick_sigma_db: 0.0,
        }
    }
}

impl GenConfig {
    pub fn with_seed(master_seed: u64) -> Self {
        GenConfig {
            master_seed,
            ..GenConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_rays < 2 {
            return Err(Error::invalid("m_rays", format!("{} < 2", self.m_rays)));
        }
        if !(self.r_tau > 1.0) || !self.r_tau.is_finite() {
            return Err(Error::invalid(
                "r_tau",
                format!("{} is not > 1", self.r_tau),
            ));
        }
        if !(self.zeta_db >= 0.0) || !self.zeta_db.is_finite() {
            return Err(Error::invalid(
                "zeta_db",
                format!("{} is not >= 0", self.zeta_db),
            ));
        }
        let (lo, hi) = self.doppler_hz_range;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(
                "doppler_hz_range",
                format!("[{lo}, {hi}] is not an interval"),
            ));
        }
        if let Some(ick) = self.ick_db {
            if !ick.is_finite() {
                return Err(Error::invalid("ick_db", "must be finite"));
            }
        }
        if !(self.ick_sigma_db >= 0.0) || !self.ick_sigma_db.is_finite() {
            return Err(Error::invalid("ick_sigma_db", "must be >= 0"));
        }
        Ok(())
    }
}
