use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Band;

/// Large-scale statistics of one band plus its reference intra-cluster
/// K-factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandProfile {
    pub band: Band,
    /// Mean of log10(DS / 1 s).
    pub ds_log10_mu: f64,
    /// Standard deviation of log10(DS / 1 s).
    pub ds_log10_sigma: f64,
    /// Mean Ricean K-factor, dB.
    pub k_mu_db: f64,
    /// Standard deviation of the Ricean K-factor, dB.
    pub k_sigma_db: f64,
    pub n_clusters: usize,
    /// Reference intra-cluster K-factor, dB.
    pub ick_db: f64,
}

impl BandProfile {
    pub fn new(
        band: Band,
        ds_log10_mu: f64,
        ds_log10_sigma: f64,
        k_mu_db: f64,
        k_sigma_db: f64,
        n_clusters: usize,
        ick_db: f64,
    ) -> Result<Self> {
        let p = BandProfile {
            band,
            ds_log10_mu,
            ds_log10_sigma,
            k_mu_db,
            k_sigma_db,
            n_clusters,
            ick_db,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("ds_log10_mu", self.ds_log10_mu),
            ("ds_log10_sigma", self.ds_log10_sigma),
            ("k_mu_db", self.k_mu_db),
            ("k_sigma_db", self.k_sigma_db),
            ("ick_db", self.ick_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("{v} is not finite")));
            }
        }
        if self.ds_log10_sigma < 0.0 {
            return Err(Error::invalid("ds_log10_sigma", "must be >= 0"));
        }
        if self.k_sigma_db < 0.0 {
            return Err(Error::invalid("k_sigma_db", "must be >= 0"));
        }
        if self.n_clusters < 1 {
            return Err(Error::invalid("n_clusters", "must be >= 1"));
        }
        Ok(())
    }

    // Indoor office, 6 / 26 / 132 GHz. DS and K from the measured large-scale
    // parameter table, ICK from the measured reference ICK table.

    pub fn cm_wave() -> Self {
        BandProfile {
            band: Band::CmWave,
            ds_log10_mu: -7.17,
            ds_log10_sigma: 0.4,
            k_mu_db: 4.23,
            k_sigma_db: 3.25,
            n_clusters: 9,
            ick_db: 4.93,
        }
    }

    pub fn mm_wave() -> Self {
        BandProfile {
            band: Band::MmWave,
            ds_log10_mu: -7.42,
            ds_log10_sigma: 0.46,
            k_mu_db: 5.52,
            k_sigma_db: 4.36,
            n_clusters: 8,
            ick_db: 9.86,
        }
    }

    pub fn sub_thz() -> Self {
        BandProfile {
            band: Band::SubThz,
            ds_log10_mu: -8.47,
            ds_log10_sigma: 0.67,
            k_mu_db: 8.0,
            k_sigma_db: 7.9,
            n_clusters: 3,
            ick_db: 17.99,
        }
    }

    /// Preset for a named band; `None` for custom bands.
    pub fn preset(band: &Band) -> Option<Self> {
        match band {
            Band::CmWave => Some(Self::cm_wave()),
            Band::MmWave => Some(Self::mm_wave()),
            Band::SubThz => Some(Self::sub_thz()),
            Band::Custom(_) => None,
        }
    }

    pub fn presets() -> [Self; 3] {
        [Self::cm_wave(), Self::mm_wave(), Self::sub_thz()]
    }

    /// Reference ICK as a linear ratio.
    pub fn ick_linear(&self) -> f64 {
        db_to_linear(self.ick_db)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
