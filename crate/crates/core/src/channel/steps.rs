//! Large-scale parameter draw, cluster delays and cluster powers.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::profile::{db_to_linear, BandProfile};

/// K-factors above this are clamped before converting to linear.
pub const K_CAP_DB: f64 = 60.0;

/// One draw of the large-scale parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LspDraw {
    /// Delay spread, seconds.
    pub ds_s: f64,
    pub k_db: f64,
    pub n_clusters: usize,
}

fn normal(mean: f64, std_dev: f64) -> Normal<f64> {
    Normal::new(mean, std_dev).expect("validated std dev")
}

/// DS is lognormal (base 10), K is normal in dB, cluster count is the band
/// mean.
pub fn draw_lsp<R: Rng + ?Sized>(profile: &BandProfile, rng: &mut R) -> LspDraw {
    let x = normal(profile.ds_log10_mu, profile.ds_log10_sigma).sample(rng);
    let k_db = normal(profile.k_mu_db, profile.k_sigma_db).sample(rng);
    LspDraw {
        ds_s: 10f64.powf(x),
        k_db,
        n_clusters: profile.n_clusters,
    }
}

/// Delays from given uniforms `x ∈ (0, 1]`: `τ' = −r_τ·DS·ln x`, sorted and
/// shifted so the first is 0.
pub fn cluster_delays_from_uniforms(ds_s: f64, r_tau: f64, uniforms: &[f64]) -> Vec<f64> {
    let mut delays: Vec<f64> = uniforms.iter().map(|x| -r_tau * ds_s * x.ln()).collect();
    delays.sort_by(|a, b| a.partial_cmp(b).expect("finite delay"));
    let min = delays.first().copied().unwrap_or(0.0);
    for d in &mut delays {
        *d -= min;
    }
    delays
}

pub fn gen_cluster_delays<R: Rng + ?Sized>(
    ds_s: f64,
    n: usize,
    r_tau: f64,
    rng: &mut R,
) -> Vec<f64> {
    // random::<f64>() is in [0, 1); flip to (0, 1] so ln never sees 0.
    let uniforms: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    cluster_delays_from_uniforms(ds_s, r_tau, &uniforms)
}

/// Normalized cluster powers, with the LoS share split out when present.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPowers {
    /// Per-cluster power, already scaled by `1/(K_R+1)` when LoS is present.
    pub clusters: Vec<f64>,
    /// `K_R/(K_R+1)`, or `None` without LoS.
    pub los: Option<f64>,
}

impl ClusterPowers {
    pub fn total(&self) -> f64 {
        self.clusters.iter().sum::<f64>() + self.los.unwrap_or(0.0)
    }
}

/// Cluster powers from given per-cluster shadowing terms (dB):
/// `P'ₙ = exp(−τₙ(r_τ−1)/(r_τ·DS)) · 10^(−Zₙ/10)`, normalized to 1, then the
/// LoS split when `k_db` is given.
pub fn cluster_powers_from_shadowing(
    delays: &[f64],
    ds_s: f64,
    r_tau: f64,
    shadowing_db: &[f64],
    k_db: Option<f64>,
) -> ClusterPowers {
    debug_assert_eq!(delays.len(), shadowing_db.len());
    let raw: Vec<f64> = delays
        .iter()
        .zip(shadowing_db)
        .map(|(tau, z)| (-tau * (r_tau - 1.0) / (r_tau * ds_s)).exp() * 10f64.powf(-z / 10.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut clusters: Vec<f64> = raw.into_iter().map(|p| p / total).collect();
    let los = k_db.map(|k| {
        let k_r = db_to_linear(k.min(K_CAP_DB));
        for p in &mut clusters {
            *p /= k_r + 1.0;
        }
        k_r / (k_r + 1.0)
    });
    ClusterPowers { clusters, los }
}

pub fn gen_cluster_powers<R: Rng + ?Sized>(
    delays: &[f64],
    ds_s: f64,
    r_tau: f64,
    k_db: f64,
    zeta_db: f64,
    has_los: bool,
    rng: &mut R,
) -> ClusterPowers {
    let shadow = normal(0.0, zeta_db);
    let shadowing: Vec<f64> = delays.iter().map(|_| shadow.sample(rng)).collect();
    cluster_powers_from_shadowing(delays, ds_s, r_tau, &shadowing, has_los.then_some(k_db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::drop_rng;

    #[test]
    fn degenerate_sigma_gives_band_means() {
        let mut p = BandProfile::sub_thz();
        p.ds_log10_sigma = 0.0;
        p.k_sigma_db = 0.0;
        let lsp = draw_lsp(&p, &mut drop_rng(1, 0));
        assert!((lsp.ds_s - 10f64.powf(-8.47)).abs() < 1e-20);
        assert!((lsp.ds_s - 3.39e-9).abs() < 0.01e-9);
        assert_eq!(lsp.k_db, 8.0);
        assert_eq!(lsp.n_clusters, 3);

        let mut c = BandProfile::cm_wave();
        c.k_sigma_db = 0.0;
        assert_eq!(draw_lsp(&c, &mut drop_rng(1, 0)).k_db, 4.23);
    }

    #[test]
    fn lsp_is_deterministic() {
        let p = BandProfile::mm_wave();
        assert_eq!(
            draw_lsp(&p, &mut drop_rng(9, 4)),
            draw_lsp(&p, &mut drop_rng(9, 4))
        );
    }

    #[test]
    fn delays_hand_example() {
        // x = {e⁻¹, e⁻²}, DS = 1 ns, r_τ = 2 → raw {2, 4} ns → [0, 2] ns
        let x = [(-1f64).exp(), (-2f64).exp()];
        let d = cluster_delays_from_uniforms(1e-9, 2.0, &x);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 2e-9).abs() < 1e-21);
    }

    #[test]
    fn delays_sorted_nonnegative() {
        assert_eq!(
            gen_cluster_delays(5e-9, 1, 3.6, &mut drop_rng(0, 0)),
            vec![0.0]
        );
        let d = gen_cluster_delays(5e-9, 12, 3.6, &mut drop_rng(0, 1));
        assert_eq!(d[0], 0.0);
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
        assert!(d.iter().all(|t| *t >= 0.0 && t.is_finite()));
    }

    #[test]
    fn power_ratio_follows_delay_law() {
        let (ds, r_tau, tau) = (20e-9, 3.6, 15e-9);
        let p = cluster_powers_from_shadowing(&[0.0, tau], ds, r_tau, &[0.0, 0.0], None);
        let expected = (tau * (r_tau - 1.0) / (r_tau * ds)).exp();
        assert!((p.clusters[0] / p.clusters[1] - expected).abs() < 1e-12);
        assert_eq!(p.los, None);
    }

    #[test]
    fn los_split_and_cap() {
        let p = cluster_powers_from_shadowing(
            &[0.0, 1e-9, 3e-9],
            5e-9,
            3.6,
            &[1.0, -2.0, 0.5],
            Some(6.0),
        );
        assert!((p.total() - 1.0).abs() < 1e-12);

        let p = cluster_powers_from_shadowing(
            &[0.0, 1e-9],
            5e-9,
            3.6,
            &[0.0, 0.0],
            Some(f64::INFINITY),
        );
        let los = p.los.unwrap();
        assert!(los > 1.0 - 1e-5 && los < 1.0);
        assert!((p.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generated_powers_sum_to_one() {
        let mut rng = drop_rng(3, 3);
        let d = gen_cluster_delays(30e-9, 9, 3.6, &mut rng);
        for los in [false, true] {
            let p = gen_cluster_powers(&d, 30e-9, 3.6, 4.0, 6.0, los, &mut rng);
            assert!((p.total() - 1.0).abs() < 1e-12);
            assert_eq!(p.los.is_some(), los);
        }
    }
}
