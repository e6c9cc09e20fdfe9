//! Power-weighted k-means over standardized (delay, direction) features.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::aux_rng;
use crate::types::{Cluster, Ray};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansParams {
    /// Largest `k` tried by the elbow search.
    pub max_k: usize,
    /// Stop increasing `k` once the next step reduces the weighted distance
    /// by less than this fraction of the one-cluster distance.
    pub elbow_threshold: f64,
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            max_k: 10,
            elbow_threshold: 0.10,
            restarts: 8,
            max_iter: 200,
            seed: 0,
        }
    }
}

const FEATURES: usize = 4;

/// Delay plus unit direction vector, each column scaled to unit variance.
/// Constant columns become zero.
fn features(rays: &[Ray]) -> Vec<[f64; FEATURES]> {
    let raw: Vec<[f64; FEATURES]> = rays
        .iter()
        .map(|r| {
            let (az, el) = (r.aoa_az_deg.to_radians(), r.aoa_el_deg.to_radians());
            [
                r.delay_s,
                el.cos() * az.cos(),
                el.cos() * az.sin(),
                el.sin(),
            ]
        })
        .collect();
    let n = raw.len() as f64;
    let mut out = raw.clone();
    for c in 0..FEATURES {
        let mean = raw.iter().map(|x| x[c]).sum::<f64>() / n;
        let var = raw.iter().map(|x| (x[c] - mean).powi(2)).sum::<f64>() / n;
        let scale = mean.abs().max(1.0) * 1e-12;
        let sd = var.sqrt();
        for (o, x) in out.iter_mut().zip(&raw) {
            o[c] = if sd > scale { (x[c] - mean) / sd } else { 0.0 };
        }
    }
    out
}

fn dist2(a: &[f64; FEATURES], b: &[f64; FEATURES]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

struct Fit {
    labels: Vec<usize>,
    cost: f64,
}

fn nearest(x: &[f64; FEATURES], centers: &[[f64; FEATURES]]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centers.iter().enumerate() {
        let d = dist2(x, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn plus_plus<R: Rng>(
    x: &[[f64; FEATURES]],
    w: &[f64],
    k: usize,
    rng: &mut R,
) -> Vec<[f64; FEATURES]> {
    let mut centers = Vec::with_capacity(k);
    let total: f64 = w.iter().sum();
    let pick = |weights: &[f64], sum: f64, rng: &mut R| {
        let mut u = rng.random::<f64>() * sum;
        for (i, wi) in weights.iter().enumerate() {
            u -= wi;
            if u < 0.0 {
                return i;
            }
        }
        weights.iter().rposition(|wi| *wi > 0.0).unwrap_or(0)
    };
    centers.push(x[pick(w, total, rng)]);
    while centers.len() < k {
        let d: Vec<f64> = x
            .iter()
            .zip(w)
            .map(|(xi, wi)| wi * nearest(xi, &centers).1)
            .collect();
        let sum: f64 = d.iter().sum();
        if sum <= 0.0 {
            // Every point already coincides with a center.
            centers.push(x[centers.len() % x.len()]);
            continue;
        }
        centers.push(x[pick(&d, sum, rng)]);
    }
    centers
}

fn lloyd(
    x: &[[f64; FEATURES]],
    w: &[f64],
    mut centers: Vec<[f64; FEATURES]>,
    max_iter: usize,
) -> Fit {
    let k = centers.len();
    let mut labels = vec![usize::MAX; x.len()];
    for _ in 0..max_iter {
        let mut changed = false;
        for (i, xi) in x.iter().enumerate() {
            let (l, _) = nearest(xi, &centers);
            if labels[i] != l {
                labels[i] = l;
                changed = true;
            }
        }
        let mut sums = vec![[0.0; FEATURES]; k];
        let mut mass = vec![0.0; k];
        for ((xi, wi), &l) in x.iter().zip(w).zip(&labels) {
            mass[l] += wi;
            for c in 0..FEATURES {
                sums[l][c] += wi * xi[c];
            }
        }
        for j in 0..k {
            if mass[j] > 0.0 {
                for c in 0..FEATURES {
                    centers[j][c] = sums[j][c] / mass[j];
                }
            } else {
                // Re-seed an empty cluster at the worst-served point.
                let far = x
                    .iter()
                    .zip(w)
                    .enumerate()
                    .map(|(i, (xi, wi))| (i, wi * dist2(xi, &centers[labels[i]])))
                    .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                centers[j] = x[far];
                labels[far] = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let cost = x
        .iter()
        .zip(w)
        .zip(&labels)
        .map(|((xi, wi), &l)| wi * dist2(xi, &centers[l]))
        .sum();
    Fit { labels, cost }
}

fn best_fit(x: &[[f64; FEATURES]], w: &[f64], k: usize, params: &KMeansParams) -> Fit {
    let mut rng = aux_rng(params.seed, k as u64);
    let mut best: Option<Fit> = None;
    for _ in 0..params.restarts.max(1) {
        let fit = lloyd(x, w, plus_plus(x, w, k, &mut rng), params.max_iter);
        if best.as_ref().is_none_or(|b| fit.cost < b.cost) {
            best = Some(fit);
        }
    }
    best.expect("at least one restart")
}

/// Canonical ray order so the result does not depend on input order.
fn canonical(rays: &[Ray]) -> Vec<Ray> {
    let mut sorted = rays.to_vec();
    sorted.sort_by(|a, b| {
        (a.delay_s, a.aoa_az_deg, a.aoa_el_deg, a.power)
            .partial_cmp(&(b.delay_s, b.aoa_az_deg, b.aoa_el_deg, b.power))
            .expect("finite")
    });
    sorted
}

fn to_clusters(rays: &[Ray], labels: &[usize], k: usize) -> Result<Vec<Cluster>> {
    let mut groups: Vec<Vec<Ray>> = vec![Vec::new(); k];
    for (r, &l) in rays.iter().zip(labels) {
        groups[l].push(*r);
    }
    groups.retain(|g| !g.is_empty());
    // Order clusters by first arrival, then by power.
    groups.sort_by(|a, b| {
        let key = |g: &Vec<Ray>| (g[0].delay_s, -g.iter().map(|r| r.power).sum::<f64>());
        key(a).partial_cmp(&key(b)).expect("finite")
    });
    groups
        .into_iter()
        .enumerate()
        .map(|(c, g)| Cluster::new(g.into_iter().map(|r| r.in_cluster(c)).collect()))
        .collect()
}

/// Clusters `rays` into `target_k` groups, or picks `k` by the elbow rule
/// when `target_k` is `None`. Clusters are ordered by first arrival.
pub fn cluster_rays(
    rays: &[Ray],
    target_k: Option<usize>,
    params: &KMeansParams,
) -> Result<Vec<Cluster>> {
    for r in rays {
        r.validate()?;
    }
    let needed = target_k.unwrap_or(1).max(1);
    if rays.len() < needed {
        return Err(Error::TooFewRays {
            needed,
            k: needed,
            got: rays.len(),
        });
    }
    let rays = canonical(rays);
    let x = features(&rays);
    let w: Vec<f64> = rays.iter().map(|r| r.power).collect();

    let k = match target_k {
        Some(k) => k,
        None => {
            let k_max = params.max_k.max(1).min(rays.len());
            let mut costs = Vec::with_capacity(k_max);
            for k in 1..=k_max {
                costs.push(best_fit(&x, &w, k, params).cost);
            }
            elbow(&costs, params.elbow_threshold)
        }
    };
    let fit = best_fit(&x, &w, k, params);
    to_clusters(&rays, &fit.labels, k)
}

/// Smallest `k` (1-based) after which adding a cluster gains less than
/// `threshold` of the one-cluster cost.
pub fn elbow(costs: &[f64], threshold: f64) -> usize {
    let Some(&base) = costs.first() else { return 1 };
    if base <= 0.0 {
        return 1;
    }
    for k in 1..costs.len() {
        if (costs[k - 1] - costs[k]) / base < threshold {
            return k;
        }
    }
    costs.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn three_groups() -> Vec<Ray> {
        let mut rays = Vec::new();
        for (c, (delay, az)) in [(10e-9, -120.0), (80e-9, 0.0), (200e-9, 110.0)]
            .iter()
            .enumerate()
        {
            for j in 0..5 {
                let p = if j == 0 { 1.0 } else { 0.1 + 0.01 * c as f64 };
                rays.push(Ray::new(delay + j as f64 * 1e-9, p).with_angle(az + j as f64, 0.0));
            }
        }
        rays
    }

    #[test]
    fn elbow_finds_three_groups() {
        let c = cluster_rays(&three_groups(), None, &KMeansParams::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(|cl| cl.rays().len() == 5));
        assert!(c[0].rays()[0].delay_s < c[1].rays()[0].delay_s);
    }

    #[test]
    fn fixed_k() {
        let c = cluster_rays(&three_groups(), Some(3), &KMeansParams::default()).unwrap();
        assert_eq!(c.len(), 3);
        let total: f64 = c.iter().map(|cl| cl.power()).sum();
        assert!((total - three_groups().iter().map(|r| r.power).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariant() {
        let rays = three_groups();
        let base = cluster_rays(&rays, None, &KMeansParams::default()).unwrap();
        let mut rng = aux_rng(9, 9);
        for _ in 0..5 {
            let mut shuffled = rays.clone();
            shuffled.shuffle(&mut rng);
            assert_eq!(
                cluster_rays(&shuffled, None, &KMeansParams::default()).unwrap(),
                base
            );
        }
    }

    #[test]
    fn too_few_rays() {
        let rays = vec![Ray::new(0.0, 1.0), Ray::new(1e-9, 0.5)];
        assert_eq!(
            cluster_rays(&rays, Some(3), &KMeansParams::default()),
            Err(Error::TooFewRays {
                needed: 3,
                k: 3,
                got: 2
            })
        );
        assert!(cluster_rays(&[], None, &KMeansParams::default()).is_err());
    }

    #[test]
    fn single_ray_single_cluster() {
        let c = cluster_rays(&[Ray::new(0.0, 1.0)], None, &KMeansParams::default()).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn elbow_rule() {
        assert_eq!(elbow(&[100.0, 40.0, 5.0, 4.0, 3.5], 0.1), 3);
        assert_eq!(elbow(&[100.0, 95.0], 0.1), 1);
        assert_eq!(elbow(&[0.0, 0.0], 0.1), 1);
        assert_eq!(elbow(&[100.0, 50.0, 20.0], 0.1), 3);
    }
}
