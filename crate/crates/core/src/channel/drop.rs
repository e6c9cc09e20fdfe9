use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::alloc::Allocation;
use super::config::{GenConfig, LosInjection};
use super::profile::{db_to_linear, BandProfile};
use super::steps::{draw_lsp, gen_cluster_delays, gen_cluster_powers, LspDraw};
use crate::error::{Error, Result};
use crate::rng::drop_rng;
use crate::types::{AllocationMode, ChannelRealization, Cluster, Ray};

/// A drop plus the intermediate quantities that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DropDetail {
    pub realization: ChannelRealization,
    pub lsp: LspDraw,
    /// Cluster delays, seconds, ascending from 0.
    pub cluster_delays: Vec<f64>,
    /// Final per-cluster power including any folded LoS share.
    pub cluster_powers: Vec<f64>,
    /// Linear ICK used per cluster (ICK mode only).
    pub cluster_ick: Vec<f64>,
    /// The LoS ray sits outside the cluster rays.
    pub separate_los: bool,
}

impl DropDetail {
    /// Rays regrouped by generating cluster. A separately injected LoS ray
    /// is returned on its own.
    pub fn clusters(&self) -> (Vec<Cluster>, Option<Ray>) {
        let mut groups: Vec<Vec<Ray>> = vec![Vec::new(); self.cluster_powers.len()];
        let mut los = None;
        for ray in &self.realization.rays {
            match ray.cluster {
                Some(c) if !(ray.is_los && self.separate_los) => groups[c].push(*ray),
                _ => los = Some(*ray),
            }
        }
        let clusters = groups
            .into_iter()
            .map(|g| Cluster::new(g).expect("non-empty cluster"))
            .collect();
        (clusters, los)
    }
}

/// Generates drop `drop_index` of the stream defined by `cfg.master_seed`.
pub fn generate_drop(
    profile: &BandProfile,
    cfg: &GenConfig,
    mode: AllocationMode,
    drop_index: u64,
) -> Result<ChannelRealization> {
    generate_drop_detail(profile, cfg, mode, drop_index).map(|d| d.realization)
}

/// Same as [`generate_drop`] but keeps the intermediate draws.
///
/// Draw order inside the drop stream is fixed (LSPs, delays, shadowing,
/// angles, then per-cluster ICK) and does not depend on `mode`, so the equal
/// and ICK realizations of one drop index share their cluster structure.
pub fn generate_drop_detail(
    profile: &BandProfile,
    cfg: &GenConfig,
    mode: AllocationMode,
    drop_index: u64,
) -> Result<DropDetail> {
    profile.validate()?;
    cfg.validate()?;
    let mut rng = drop_rng(cfg.master_seed, drop_index);

    let lsp = draw_lsp(profile, &mut rng);
    let delays = gen_cluster_delays(lsp.ds_s, lsp.n_clusters, cfg.r_tau, &mut rng);
    let powers = gen_cluster_powers(
        &delays,
        lsp.ds_s,
        cfg.r_tau,
        lsp.k_db,
        cfg.zeta_db,
        cfg.los,
        &mut rng,
    );
    let mut azimuths: Vec<f64> = (0..lsp.n_clusters)
        .map(|_| rng.random_range(-180.0..180.0))
        .collect();
    if cfg.los {
        // The LoS direction is the angular origin.
        azimuths[0] = 0.0;
    }

    let ick_db = cfg.ick_db.unwrap_or(profile.ick_db);
    let cluster_ick: Vec<f64> = if cfg.ick_sigma_db > 0.0 {
        let spread = Normal::new(ick_db, cfg.ick_sigma_db)
            .map_err(|e| Error::invalid("ick_sigma_db", e.to_string()))?;
        (0..lsp.n_clusters)
            .map(|_| db_to_linear(spread.sample(&mut rng)))
            .collect()
    } else {
        vec![db_to_linear(ick_db); lsp.n_clusters]
    };

    let mut cluster_powers = powers.clusters.clone();
    let fold = cfg.los_injection == LosInjection::Fold;
    if let (Some(los), true) = (powers.los, fold) {
        cluster_powers[0] += los;
    }

    let m = cfg.m_rays;
    let mut rays = Vec::with_capacity(lsp.n_clusters * m + 1);
    if let (Some(los), false) = (powers.los, fold) {
        rays.push(Ray::new(0.0, los).los().in_cluster(0));
    }
    for (n, ((&p_n, &tau), &az)) in cluster_powers
        .iter()
        .zip(&delays)
        .zip(&azimuths)
        .enumerate()
    {
        let alloc = match mode {
            AllocationMode::Equal => Allocation::Equal,
            AllocationMode::Ick => Allocation::Ick(cluster_ick[n]),
        };
        for (k, p) in alloc.apply(p_n, m)?.into_iter().enumerate() {
            let mut ray = Ray::new(tau, p).with_angle(az, 0.0).in_cluster(n);
            ray.is_los = fold && powers.los.is_some() && n == 0 && k == 0;
            rays.push(ray);
        }
    }

    let realization = ChannelRealization {
        rays,
        band: profile.band.clone(),
        has_los: powers.los.is_some(),
        seed: cfg.master_seed,
        drop_index,
        mode,
    };
    debug_assert!(realization.validate().is_ok());
    Ok(DropDetail {
        realization,
        lsp,
        cluster_delays: delays,
        cluster_powers,
        cluster_ick: match mode {
            AllocationMode::Ick => cluster_ick,
            AllocationMode::Equal => Vec::new(),
        },
        separate_los: !fold && powers.los.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Band;

    #[test]
    fn sub_thz_shape() {
        let cfg = GenConfig::with_seed(7);
        let d =
            generate_drop_detail(&BandProfile::sub_thz(), &cfg, AllocationMode::Equal, 0).unwrap();
        let r = &d.realization;
        assert_eq!(r.rays.len(), 3 * 20);
        assert!(r.has_los);
        assert_eq!(r.rays.iter().filter(|x| x.is_los).count(), 1);
        assert!(r.rays[0].is_los);
        assert_eq!(r.band, Band::SubThz);
        assert!((r.total_power() - 1.0).abs() < 1e-9);

        let sep = GenConfig {
            los_injection: LosInjection::Separate,
            ..cfg
        };
        let r = generate_drop(&BandProfile::sub_thz(), &sep, AllocationMode::Equal, 0).unwrap();
        assert_eq!(r.rays.len(), 3 * 20 + 1);
        assert!((r.total_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_per_drop() {
        let cfg = GenConfig::with_seed(99);
        for mode in AllocationMode::ALL {
            let a = generate_drop(&BandProfile::mm_wave(), &cfg, mode, 17).unwrap();
            let b = generate_drop(&BandProfile::mm_wave(), &cfg, mode, 17).unwrap();
            assert_eq!(a, b);
            let c = generate_drop(&BandProfile::mm_wave(), &cfg, mode, 18).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn ick_mode_dominant_share() {
        let cfg = GenConfig::with_seed(3);
        let p = BandProfile::cm_wave();
        let d = generate_drop_detail(&p, &cfg, AllocationMode::Ick, 5).unwrap();
        let i = p.ick_linear();
        let (clusters, los) = d.clusters();
        assert!(los.is_none());
        let holders = clusters
            .iter()
            .filter(|c| {
                c.rays()
                    .iter()
                    .any(|r| (r.power / c.power() - i / (i + 1.0)).abs() < 1e-12)
            })
            .count();
        assert_eq!(holders, p.n_clusters);
        assert_eq!(d.cluster_ick.len(), p.n_clusters);
    }

    #[test]
    fn modes_share_cluster_structure() {
        let cfg = GenConfig::with_seed(21);
        let p = BandProfile::mm_wave();
        let e = generate_drop_detail(&p, &cfg, AllocationMode::Equal, 2).unwrap();
        let k = generate_drop_detail(&p, &cfg, AllocationMode::Ick, 2).unwrap();
        assert_eq!(e.cluster_delays, k.cluster_delays);
        assert_eq!(e.cluster_powers, k.cluster_powers);
    }

    #[test]
    fn nlos_drop_has_no_los_ray() {
        let cfg = GenConfig {
            los: false,
            ..GenConfig::with_seed(1)
        };
        let r = generate_drop(&BandProfile::cm_wave(), &cfg, AllocationMode::Ick, 0).unwrap();
        assert!(!r.has_los);
        assert!(r.rays.iter().all(|x| !x.is_los));
        assert!((r.total_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn per_cluster_ick_spread() {
        let cfg = GenConfig {
            ick_sigma_db: 3.0,
            ..GenConfig::with_seed(4)
        };
        let d =
            generate_drop_detail(&BandProfile::mm_wave(), &cfg, AllocationMode::Ick, 0).unwrap();
        assert!(d.cluster_ick.windows(2).any(|w| w[0] != w[1]));
        assert!((d.realization.total_power() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ick_needs_two_rays() {
        let cfg = GenConfig {
            m_rays: 1,
            ..GenConfig::default()
        };
        assert!(generate_drop(&BandProfile::cm_wave(), &cfg, AllocationMode::Ick, 0).is_err());
    }
}
