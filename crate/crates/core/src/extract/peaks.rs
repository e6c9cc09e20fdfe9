use super::sounder::{angular_offset, Pdp};
use crate::types::Ray;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub bin: usize,
    pub delay_s: f64,
    pub power: f64,
}

/// Strict interior local maxima of the PDP above `floor_db` (relative to the
/// PDP's strongest bin). The first and last bins are never peaks. Among
/// maxima closer than `min_separation_s`, only the strongest is kept.
/// Output is sorted by delay.
pub fn find_peaks(pdp: &Pdp, min_separation_s: f64, floor_db: f64) -> Vec<Peak> {
    let bins = &pdp.bins;
    if bins.len() < 3 {
        return Vec::new();
    }
    let max = bins.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let threshold = max * 10f64.powf(floor_db / 10.0);
    let mut candidates: Vec<Peak> = (1..bins.len() - 1)
        .filter(|&k| bins[k] > bins[k - 1] && bins[k] > bins[k + 1] && bins[k] >= threshold)
        .map(|k| Peak {
            bin: k,
            delay_s: k as f64 * pdp.sample_interval_s,
            power: bins[k],
        })
        .collect();

    let min_sep = min_separation_s.max(pdp.sample_interval_s);
    // Guard against bin arithmetic landing a hair under an exact multiple.
    let closer = |a: &Peak, b: &Peak| {
        ((a.bin as f64 - b.bin as f64).abs() * pdp.sample_interval_s) < min_sep * (1.0 - 1e-9)
    };
    candidates.sort_by(|a, b| {
        b.power
            .partial_cmp(&a.power)
            .expect("finite")
            .then(a.bin.cmp(&b.bin))
    });
    let mut kept: Vec<Peak> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| !closer(k, &c)) {
            kept.push(c);
        }
    }
    kept.sort_by_key(|p| p.bin);
    kept
}

/// Tolerances for merging duplicates of one ray seen at nearby pointings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenParams {
    /// Peaks within this delay difference are "the same delay".
    pub delay_tolerance_s: f64,
    /// Pointings within this angular offset are adjacent.
    pub adjacency_deg: f64,
}

impl ScreenParams {
    /// Half a resolution bin and 1.5 beamwidths.
    pub fn new(resolution_s: f64, beamwidth_deg: f64) -> Self {
        ScreenParams {
            delay_tolerance_s: resolution_s / 2.0,
            adjacency_deg: 1.5 * beamwidth_deg,
        }
    }
}

/// Peaks of one pointing.
#[derive(Debug, Clone, PartialEq)]
pub struct AnglePeaks {
    pub az_deg: f64,
    pub el_deg: f64,
    pub peaks: Vec<Peak>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Merges peaks that share a delay across adjacent pointings (transitively)
/// and keeps the strongest of each group, with its pointing as the ray angle.
/// Output is sorted by delay, then azimuth.
pub fn screen_same_delay(per_angle: &[AnglePeaks], params: ScreenParams) -> Vec<Ray> {
    let flat: Vec<(f64, f64, Peak)> = per_angle
        .iter()
        .flat_map(|a| a.peaks.iter().map(move |p| (a.az_deg, a.el_deg, *p)))
        .collect();
    let n = flat.len();
    let mut parent: Vec<usize> = (0..n).collect();
    // Sort indices by delay so only a window of candidates needs checking.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        flat[a]
            .2
            .delay_s
            .partial_cmp(&flat[b].2.delay_s)
            .expect("finite")
    });
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if flat[b].2.delay_s - flat[a].2.delay_s > params.delay_tolerance_s * (1.0 + 1e-9) {
                break;
            }
            if angular_offset(flat[a].0, flat[a].1, flat[b].0, flat[b].1) <= params.adjacency_deg {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut best: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for idx in 0..n {
        let root = find(&mut parent, idx);
        let entry = best.entry(root).or_insert(idx);
        if flat[idx].2.power > flat[*entry].2.power {
            *entry = idx;
        }
    }
    let mut rays: Vec<Ray> = best
        .values()
        .map(|&idx| {
            let (az, el, p) = flat[idx];
            Ray::new(p.delay_s, p.power).with_angle(az, el)
        })
        .collect();
    rays.sort_by(|a, b| {
        a.delay_s
            .partial_cmp(&b.delay_s)
            .expect("finite")
            .then(a.aoa_az_deg.partial_cmp(&b.aoa_az_deg).expect("finite"))
    });
    rays
}
