//! Synthetic rotating-horn sounder.
//!
//! Each grid pointing produces one CIR. A ray contributes
//! `√(p·g(Δ))·e^{jφ}` at its nearest delay bin, where `g` is a Gaussian main
//! lobe with the configured 3 dB beamwidth and `φ` is one random phase per
//! ray. Antenna gain is carried as metadata only; the pattern is normalized
//! to unit boresight gain.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{wrap_azimuth, Band, Ray};

/// Complex impulse response at one antenna pointing.
#[derive(Debug, Clone, PartialEq)]
pub struct Cir {
    pub taps: Vec<Complex64>,
    pub sample_interval_s: f64,
    pub az_deg: f64,
    pub el_deg: f64,
}

/// `|taps|²` of a [`Cir`].
#[derive(Debug, Clone, PartialEq)]
pub struct Pdp {
    pub bins: Vec<f64>,
    pub sample_interval_s: f64,
    pub az_deg: f64,
    pub el_deg: f64,
}

impl Cir {
    pub fn pdp(&self) -> Pdp {
        Pdp {
            bins: self.taps.iter().map(|t| t.norm_sqr()).collect(),
            sample_interval_s: self.sample_interval_s,
            az_deg: self.az_deg,
            el_deg: self.el_deg,
        }
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|t| t.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SounderModel {
    /// Full 3 dB beamwidth of the receive horn, degrees.
    pub beamwidth_az_3db_deg: f64,
    pub antenna_gain_db: f64,
    /// Pointings `(az, el)` in degrees.
    pub angle_grid: Vec<(f64, f64)>,
    pub bandwidth_hz: f64,
    /// Peak-detection floor relative to the strongest bin over all
    /// pointings, dB.
    pub noise_floor_db: f64,
    /// Additive complex Gaussian noise power relative to the strongest ray,
    /// dB. `None` synthesizes noiseless CIRs.
    pub noise_db: Option<f64>,
    /// Length of every CIR in seconds.
    pub window_s: f64,
    /// Empty samples recorded before delay 0, so that a ray at delay 0 is an
    /// interior sample with neighbours on both sides.
    pub pretrigger_bins: usize,
}

impl Default for SounderModel {
    fn default() -> Self {
        SounderModel::for_band(&Band::SubThz)
    }
}

impl SounderModel {
    /// Azimuth −180°..170° in 10° steps at elevations −10°, 0°, +10°.
    pub fn rotation_grid() -> Vec<(f64, f64)> {
        let mut grid = Vec::with_capacity(36 * 3);
        for el in [-10.0, 0.0, 10.0] {
            for k in 0..36 {
                grid.push((-180.0 + 10.0 * k as f64, el));
            }
        }
        grid
    }

    /// Receive-side horn of the 6 / 26 / 132 GHz measurement setups.
    pub fn for_band(band: &Band) -> Self {
        let (beamwidth, gain, bandwidth) = match band {
            Band::CmWave => (15.5, 20.3, 200e6),
            Band::MmWave => (9.02, 24.75, 200e6),
            Band::SubThz | Band::Custom(_) => (9.9, 25.1, 1.2e9),
        };
        SounderModel {
            beamwidth_az_3db_deg: beamwidth,
            antenna_gain_db: gain,
            angle_grid: Self::rotation_grid(),
            bandwidth_hz: bandwidth,
            noise_floor_db: -25.0,
            noise_db: None,
            window_s: 2e-6,
            pretrigger_bins: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beamwidth_az_3db_deg > 0.0) {
            return Err(Error::invalid("beamwidth_az_3db_deg", "must be > 0"));
        }
        if self.angle_grid.is_empty() {
            return Err(Error::invalid("angle_grid", "must not be empty"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", "must be > 0"));
        }
        if !(self.window_s > 0.0) {
            return Err(Error::invalid("window_s", "must be > 0"));
        }
        Ok(())
    }

    /// Temporal resolution `1/B`, also used as the sample interval.
    pub fn resolution_s(&self) -> f64 {
        1.0 / self.bandwidth_hz
    }

    /// Taps per CIR, pre-trigger included.
    pub fn n_taps(&self) -> usize {
        self.pretrigger_bins + (self.window_s / self.resolution_s()).round() as usize
    }

    /// Power gain at angular offset `offset_deg` from boresight.
    pub fn gain(&self, offset_deg: f64) -> f64 {
        let half = self.beamwidth_az_3db_deg / 2.0;
        2f64.powf(-(offset_deg / half).powi(2))
    }
}

/// Angular separation used for the antenna pattern and for adjacency, degrees.
pub fn angular_offset(az_a: f64, el_a: f64, az_b: f64, el_b: f64) -> f64 {
    let daz = wrap_azimuth(az_a - az_b);
    let del = el_a - el_b;
    (daz * daz + del * del).sqrt()
}

/// One CIR per grid pointing.
pub fn synthesize_measurement<R: Rng + ?Sized>(
    truth: &[Ray],
    sm: &SounderModel,
    rng: &mut R,
) -> Result<Vec<Cir>> {
    if truth.is_empty() {
        return Err(Error::invalid("truth", "need at least one ray"));
    }
    sm.validate()?;
    let dt = sm.resolution_s();
    let n_taps = sm.n_taps();
    let mut placed = Vec::with_capacity(truth.len());
    for ray in truth {
        ray.validate()?;
        let bin = sm.pretrigger_bins + (ray.delay_s / dt).round() as usize;
        if bin >= n_taps {
            return Err(Error::DelayOutsideWindow {
                delay_s: ray.delay_s,
                window_s: sm.window_s,
            });
        }
        let phase = rng.random_range(0.0..TAU);
        placed.push((bin, phase, ray));
    }
    let noise = match sm.noise_db {
        Some(db) => {
            let strongest = truth.iter().map(|r| r.power).fold(0.0, f64::max);
            let per_component = (strongest * 10f64.powf(db / 10.0) / 2.0).sqrt();
            Some(
                Normal::new(0.0, per_component)
                    .map_err(|e| Error::invalid("noise_db", e.to_string()))?,
            )
        }
        None => None,
    };

    let mut cirs = Vec::with_capacity(sm.angle_grid.len());
    for &(az, el) in &sm.angle_grid {
        let mut taps = vec![Complex64::new(0.0, 0.0); n_taps];
        for &(bin, phase, ray) in &placed {
            let g = sm.gain(angular_offset(ray.aoa_az_deg, ray.aoa_el_deg, az, el));
            taps[bin] += Complex64::from_polar((ray.power * g).sqrt(), phase);
        }
        if let Some(n) = &noise {
            for t in &mut taps {
                *t += Complex64::new(n.sample(rng), n.sample(rng));
            }
        }
        cirs.push(Cir {
            taps,
            sample_interval_s: dt,
            az_deg: az,
            el_deg: el,
        });
    }
    Ok(cirs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::aux_rng;

    fn single_pointing(sm: &SounderModel, az: f64) -> SounderModel {
        SounderModel {
            angle_grid: vec![(az, 0.0)],
            ..sm.clone()
        }
    }

    #[test]
    fn boresight_ray_lands_in_one_bin() {
        let sm = single_pointing(&SounderModel::for_band(&Band::SubThz), 0.0);
        let ray = Ray::new(12.0 * sm.resolution_s(), 0.25);
        let cirs = synthesize_measurement(&[ray], &sm, &mut aux_rng(1, 1)).unwrap();
        let pdp = cirs[0].pdp();
        let nonzero: Vec<usize> = (0..pdp.bins.len()).filter(|&k| pdp.bins[k] > 0.0).collect();
        let bin = 12 + sm.pretrigger_bins;
        assert_eq!(nonzero, vec![bin]);
        assert!((pdp.bins[bin] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn three_db_offset_halves_power() {
        let base = SounderModel::for_band(&Band::MmWave);
        let sm = single_pointing(&base, base.beamwidth_az_3db_deg / 2.0);
        let ray = Ray::new(0.0, 1.0);
        let cirs = synthesize_measurement(&[ray], &sm, &mut aux_rng(1, 1)).unwrap();
        assert!((cirs[0].pdp().bins[sm.pretrigger_bins] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn sub_thz_resolution() {
        let sm = SounderModel::for_band(&Band::SubThz);
        assert!((sm.resolution_s() - 0.8333e-9).abs() < 1e-13);
        assert_eq!(SounderModel::for_band(&Band::CmWave).resolution_s(), 5e-9);
    }

    #[test]
    fn rejects_ray_beyond_window() {
        let sm = SounderModel::for_band(&Band::CmWave);
        let err =
            synthesize_measurement(&[Ray::new(5e-6, 1.0)], &sm, &mut aux_rng(1, 1)).unwrap_err();
        assert!(matches!(err, Error::DelayOutsideWindow { .. }));
        assert!(synthesize_measurement(&[], &sm, &mut aux_rng(1, 1)).is_err());
    }

    #[test]
    fn pdp_matches_taps_and_energy() {
        let sm = SounderModel {
            noise_db: Some(-20.0),
            ..SounderModel::for_band(&Band::CmWave)
        };
        let rays = [
            Ray::new(0.0, 1.0),
            Ray::new(40e-9, 0.3).with_angle(30.0, 0.0),
        ];
        let cirs = synthesize_measurement(&rays, &sm, &mut aux_rng(4, 2)).unwrap();
        assert_eq!(cirs.len(), 108);
        for cir in &cirs {
            let pdp = cir.pdp();
            assert!(pdp.bins.iter().all(|b| *b >= 0.0));
            for (b, t) in pdp.bins.iter().zip(&cir.taps) {
                assert_eq!(*b, t.norm_sqr());
            }
            let sum: f64 = pdp.bins.iter().sum();
            assert!((sum - cir.energy()).abs() <= 1e-12 * sum.max(1e-300));
        }
    }

    #[test]
    fn grid_has_rotation_layout() {
        let g = SounderModel::rotation_grid();
        assert_eq!(g.len(), 108);
        assert_eq!(g[0], (-180.0, -10.0));
        assert_eq!(g[35], (170.0, -10.0));
        assert_eq!(g[107], (170.0, 10.0));
    }
}
