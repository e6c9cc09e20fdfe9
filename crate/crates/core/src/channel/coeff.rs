//! Complex per-cluster channel coefficients.
//!
//! Every ray term is `a_m · c_m · exp(j2π v_m t)` where `c_m` has unit modulus
//! (random phase) and the prefactor `a_m` carries the allocated power:
//! `√(P_n/M)` for the equal split, `√(I/(I+1)·P_n)` for the dominant ray and
//! `√(P_n/((I+1)(M−1)))` for the rest under ICK allocation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use super::alloc::Allocation;
use crate::types::Cluster;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayCoefficient {
    /// Prefactor times unit phasor; `|amplitude|²` is the ray power.
    pub amplitude: Complex64,
    pub doppler_hz: f64,
    /// Radians in [0, 2π).
    pub phase: f64,
}

impl RayCoefficient {
    pub fn at(&self, t: f64) -> Complex64 {
        self.amplitude * Complex64::from_polar(1.0, TAU * self.doppler_hz * t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCoefficients {
    pub rays: Vec<RayCoefficient>,
}

impl ClusterCoefficients {
    /// `H_n(t)`.
    pub fn response(&self, t: f64) -> Complex64 {
        self.rays.iter().map(|r| r.at(t)).sum()
    }
}

/// `H_n(t)` written out term by term for a cluster of power `p_n`, given the
/// unit phasors `c_m` and Doppler shifts `v_m` of its `M` rays.
pub fn cluster_response(
    p_n: f64,
    alloc: Allocation,
    c: &[Complex64],
    doppler_hz: &[f64],
    t: f64,
) -> Complex64 {
    let m = c.len();
    debug_assert_eq!(m, doppler_hz.len());
    let term = |k: usize| c[k] * Complex64::from_polar(1.0, TAU * doppler_hz[k] * t);
    match alloc {
        Allocation::Equal => (p_n / m as f64).sqrt() * (0..m).map(term).sum::<Complex64>(),
        Allocation::Ick(i) => {
            let head = (i / (i + 1.0) * p_n).sqrt() * term(0);
            let tail = (1.0 / (i + 1.0) * p_n / (m as f64 - 1.0)).sqrt()
                * (1..m).map(term).sum::<Complex64>();
            head + tail
        }
    }
}

/// Draws a phase in [0, 2π) and a Doppler shift from `doppler_hz_range` for
/// every ray of every cluster. Ray powers must already be allocated.
pub fn synthesize_coefficients<R: Rng + ?Sized>(
    clusters: &[Cluster],
    doppler_hz_range: (f64, f64),
    rng: &mut R,
) -> Vec<ClusterCoefficients> {
    let (lo, hi) = doppler_hz_range;
    clusters
        .iter()
        .map(|cluster| {
            let rays = cluster
                .rays()
                .iter()
                .map(|ray| {
                    let phase = rng.random_range(0.0..TAU);
                    let doppler_hz = if hi > lo {
                        rng.random_range(lo..hi)
                    } else {
                        lo
                    };
                    RayCoefficient {
                        amplitude: Complex64::from_polar(ray.power.sqrt(), phase),
                        doppler_hz,
                        phase,
                    }
                })
                .collect();
            ClusterCoefficients { rays }
        })
        .collect()
}
