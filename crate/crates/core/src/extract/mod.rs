//! Measurement processing chain on synthetic sounder data.
//!
//! CIRs per antenna pointing are reduced to PDPs, peaks are picked per PDP,
//! duplicates of one ray seen at neighbouring pointings are screened out,
//! and the surviving rays are clustered so that per-cluster ICK and the
//! large-scale parameters can be estimated.

mod estimate;
mod kmeans;
mod peaks;
mod sounder;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use estimate::{estimate_ick, estimate_lsp, LspEstimate};
pub use kmeans::{cluster_rays, elbow, KMeansParams};
pub use peaks::{find_peaks, screen_same_delay, AnglePeaks, Peak, ScreenParams};
pub use sounder::{angular_offset, synthesize_measurement, Cir, Pdp, SounderModel};

use crate::channel::{allocate_ick, linear_to_db};
use crate::error::{Error, Result};
use crate::types::{Cluster, Ray};

/// Peaks of every pointing above the sounder's floor, screened for
/// same-delay duplicates. Delays are measured from the end of the
/// pre-trigger.
pub fn extract_rays(cirs: &[Cir], sm: &SounderModel) -> Vec<Ray> {
    let pdps: Vec<Pdp> = cirs.iter().map(Cir::pdp).collect();
    let global_max = pdps
        .iter()
        .flat_map(|p| p.bins.iter().copied())
        .fold(0.0, f64::max);
    if global_max <= 0.0 {
        return Vec::new();
    }
    let threshold = global_max * 10f64.powf(sm.noise_floor_db / 10.0);
    let resolution = sm.resolution_s();
    let per_angle: Vec<AnglePeaks> = pdps
        .par_iter()
        .map(|p| AnglePeaks {
            az_deg: p.az_deg,
            el_deg: p.el_deg,
            peaks: find_peaks(p, resolution, sm.noise_floor_db)
                .into_iter()
                .filter(|pk| pk.power >= threshold && pk.bin >= sm.pretrigger_bins)
                .map(|pk| {
                    let bin = pk.bin - sm.pretrigger_bins;
                    Peak {
                        bin,
                        delay_s: bin as f64 * p.sample_interval_s,
                        power: pk.power,
                    }
                })
                .collect(),
        })
        .collect();
    screen_same_delay(
        &per_angle,
        ScreenParams::new(resolution, sm.beamwidth_az_3db_deg),
    )
}

/// Output of the full chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub rays: Vec<Ray>,
    pub clusters: Vec<Cluster>,
    /// `None` for single-ray clusters.
    pub ick: Vec<Option<f64>>,
    /// `None` with fewer than two rays.
    pub lsp: Option<LspEstimate>,
}

pub fn extract(
    cirs: &[Cir],
    sm: &SounderModel,
    target_k: Option<usize>,
    kmeans: &KMeansParams,
) -> Result<Extraction> {
    sm.validate()?;
    let rays = extract_rays(cirs, sm);
    if rays.is_empty() {
        return Err(Error::invalid("cirs", "no peaks above the noise floor"));
    }
    let clusters = cluster_rays(&rays, target_k, kmeans)?;
    let ick = clusters.iter().map(|c| estimate_ick(c).ok()).collect();
    let lsp = estimate_lsp(&rays).ok();
    // Carry cluster labels onto the flat ray list.
    let mut labelled: Vec<Ray> = clusters
        .iter()
        .flat_map(|c| c.rays().iter().copied())
        .collect();
    labelled.sort_by(|a, b| {
        (a.delay_s, a.aoa_az_deg, a.aoa_el_deg)
            .partial_cmp(&(b.delay_s, b.aoa_az_deg, b.aoa_el_deg))
            .expect("finite")
    });
    Ok(Extraction {
        rays: labelled,
        clusters,
        ick,
        lsp,
    })
}

/// Truth-versus-estimate summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    /// Truth rays within 20 dB of the strongest.
    pub eligible: usize,
    pub recovered: usize,
    pub recovery_rate: f64,
    /// Worst delay error over recovered rays, in bins.
    pub max_delay_error_bins: f64,
    pub max_power_error_db: f64,
    /// `(truth_db, estimated_db)` per truth cluster with ≥ 2 rays that could
    /// be matched to an estimated cluster.
    pub ick_db: Vec<(f64, f64)>,
    pub max_ick_error_db: Option<f64>,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.recovery_rate >= 0.9
            && self.max_delay_error_bins < 0.5
            && self.max_power_error_db < 0.5
            && self.max_ick_error_db.is_none_or(|e| e <= 1.0)
    }
}

const ELIGIBLE_DB: f64 = -20.0;

/// Matches each eligible truth ray to the estimated ray closest in delay
/// within half a bin and one beamwidth.
pub fn compare_to_truth(truth: &[Ray], est: &Extraction, sm: &SounderModel) -> RoundTripReport {
    let dt = sm.resolution_s();
    let strongest = truth.iter().map(|r| r.power).fold(0.0, f64::max);
    let eligible: Vec<&Ray> = truth
        .iter()
        .filter(|r| r.power >= strongest * 10f64.powf(ELIGIBLE_DB / 10.0))
        .collect();
    let mut recovered = 0;
    let mut max_delay_err: f64 = 0.0;
    let mut max_power_err: f64 = 0.0;
    let mut matches: Vec<(usize, usize)> = Vec::new(); // (truth cluster, estimated cluster)
    for t in &eligible {
        let hit = est
            .rays
            .iter()
            .filter(|e| (e.delay_s - t.delay_s).abs() < 0.5 * dt)
            .filter(|e| {
                angular_offset(e.aoa_az_deg, e.aoa_el_deg, t.aoa_az_deg, t.aoa_el_deg)
                    <= sm.beamwidth_az_3db_deg
            })
            .min_by(|a, b| {
                (a.delay_s - t.delay_s)
                    .abs()
                    .partial_cmp(&(b.delay_s - t.delay_s).abs())
                    .expect("finite")
            });
        if let Some(e) = hit {
            recovered += 1;
            max_delay_err = max_delay_err.max((e.delay_s - t.delay_s).abs() / dt);
            max_power_err = max_power_err.max(linear_to_db(e.power / t.power).abs());
            if let (Some(tc), Some(ec)) = (t.cluster, e.cluster) {
                matches.push((tc, ec));
            }
        }
    }

    let mut ick_db = Vec::new();
    let mut truth_clusters: Vec<usize> = truth.iter().filter_map(|r| r.cluster).collect();
    truth_clusters.sort_unstable();
    truth_clusters.dedup();
    for tc in truth_clusters {
        let powers: Vec<f64> = truth
            .iter()
            .filter(|r| r.cluster == Some(tc))
            .map(|r| r.power)
            .collect();
        let Ok(truth_ick) = estimate::ick_of(&powers) else {
            continue;
        };
        // Majority vote over matched rays.
        let mut votes: Vec<usize> = matches.iter().filter(|m| m.0 == tc).map(|m| m.1).collect();
        votes.sort_unstable();
        let Some(ec) = mode(&votes) else { continue };
        if let Some(Some(est_ick)) = est.ick.get(ec) {
            ick_db.push((linear_to_db(truth_ick), linear_to_db(*est_ick)));
        }
    }
    let max_ick_error_db = ick_db.iter().map(|(t, e)| (t - e).abs()).reduce(f64::max);
    RoundTripReport {
        eligible: eligible.len(),
        recovered,
        recovery_rate: if eligible.is_empty() {
            1.0
        } else {
            recovered as f64 / eligible.len() as f64
        },
        max_delay_error_bins: max_delay_err,
        max_power_error_db: max_power_err,
        ick_db,
        max_ick_error_db,
    }
}

fn mode(sorted: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        if best.is_none_or(|b| j > b.1) {
            best = Some((sorted[i], j));
        }
        i += j;
    }
    best.map(|b| b.0)
}

/// Shape of a synthetic round-trip fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixtureSpec {
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    /// Linear ICK of every cluster.
    pub ick: f64,
    /// Spacing between consecutive rays of a cluster, in resolution bins.
    pub ray_spacing_bins: usize,
    /// Gap between clusters, in resolution bins.
    pub cluster_gap_bins: usize,
    /// Power ratio between consecutive clusters, dB.
    pub cluster_decay_db: f64,
    /// Rays of a cluster cycle over this many neighbouring grid pointings.
    pub pointings_per_cluster: usize,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            n_clusters: 3,
            rays_per_cluster: 5,
            ick: 4.0,
            ray_spacing_bins: 3,
            cluster_gap_bins: 40,
            cluster_decay_db: 3.0,
            pointings_per_cluster: 3,
        }
    }
}

/// Truth rays with a known per-cluster ICK on distinct delay bins. Ray
/// angles sit on sounder pointings (so there is no pattern loss), with
/// cluster centres spread evenly in azimuth under a random rotation.
pub fn round_trip_fixture<R: Rng + ?Sized>(
    spec: &FixtureSpec,
    sm: &SounderModel,
    rng: &mut R,
) -> Result<Vec<Ray>> {
    if spec.n_clusters == 0 {
        return Err(Error::invalid("n_clusters", "must be >= 1"));
    }
    if spec.ray_spacing_bins < 2 {
        return Err(Error::invalid(
            "ray_spacing_bins",
            "rays must be > 1 bin apart",
        ));
    }
    let dt = sm.resolution_s();
    let azimuths: Vec<f64> = {
        let mut a: Vec<f64> = sm
            .angle_grid
            .iter()
            .filter(|g| g.1 == 0.0)
            .map(|g| g.0)
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        a
    };
    if azimuths.is_empty() {
        return Err(Error::invalid(
            "angle_grid",
            "needs pointings at 0 deg elevation",
        ));
    }
    let rotation = rng.random_range(0..azimuths.len());
    let per_cluster = spec.pointings_per_cluster.max(1);
    let mut rays = Vec::new();
    let mut bin = 2;
    for c in 0..spec.n_clusters {
        let power = 10f64.powf(-spec.cluster_decay_db * c as f64 / 10.0);
        let split = allocate_ick(power, spec.rays_per_cluster, spec.ick)?;
        let centre = rotation + c * azimuths.len() / spec.n_clusters;
        for (j, p) in split.into_iter().enumerate() {
            let az = azimuths[(centre + j % per_cluster) % azimuths.len()];
            rays.push(
                Ray::new(bin as f64 * dt, p)
                    .with_angle(az, 0.0)
                    .in_cluster(c),
            );
            bin += spec.ray_spacing_bins;
        }
        bin += spec.cluster_gap_bins;
    }
    if bin as f64 * dt >= sm.window_s {
        return Err(Error::DelayOutsideWindow {
            delay_s: bin as f64 * dt,
            window_s: sm.window_s,
        });
    }
    Ok(rays)
}
