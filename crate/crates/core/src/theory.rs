//! Closed-form Gini index for equal and ICK intra-cluster allocation, and
//! numerical verification that ICK allocation never lowers it.
//!
//! With `N` ascending cluster powers, `M` rays per cluster and `R = N·M`,
//! the equal split yields `R` powers in `N` flat blocks. ICK allocation moves
//! `αₙ = Pₙ/M − Pₙ/((I+1)(M−1))` from each of the `M−1` weaker rays onto the
//! dominant one. Two situations arise:
//!
//! * order preserved: every dominant ray stays below the weaker rays of the
//!   next cluster, so the sorted positions match the equal split and
//!   `G_k − G_1 = Σₙ αₙ/‖p‖₁ · (M²−M)/R`;
//! * order changed: some dominant ray overtakes the next cluster's weaker
//!   rays. For two clusters the difference has a four-term closed form.

use rand::Rng;
use serde::Serialize;

use crate::channel::{allocate_ick, equal_split_ick};
use crate::error::{Error, Result};
use crate::gini::{clamp_unit, gini, sort_ascending};
use crate::rng::aux_rng;
use crate::types::PowerVector;

/// Tolerance below which a negative difference is rounding, not a
/// counterexample.
pub const DELTA_TOLERANCE: f64 = 1e-12;

/// Strictly ascending positive cluster powers and the rays per cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterPowerSet {
    powers: Vec<f64>,
    m_rays: usize,
}

impl ClusterPowerSet {
    pub fn new(powers: Vec<f64>, m_rays: usize) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::EmptyPowerVector);
        }
        if m_rays < 2 {
            return Err(Error::invalid("m_rays", format!("{m_rays} < 2")));
        }
        if let Some((idx, &p)) = powers
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p > 0.0) || !p.is_finite())
        {
            return Err(Error::NonpositivePower(p, idx));
        }
        if powers.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid(
                "powers",
                "cluster powers must be strictly ascending",
            ));
        }
        Ok(ClusterPowerSet { powers, m_rays })
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn n_clusters(&self) -> usize {
        self.powers.len()
    }

    pub fn m_rays(&self) -> usize {
        self.m_rays
    }

    /// `R = N·M`
    pub fn n_rays(&self) -> usize {
        self.powers.len() * self.m_rays
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }

    /// Power of the dominant ray of every cluster under ICK `i`.
    fn dominant(&self, i: f64) -> impl Iterator<Item = f64> + '_ {
        self.powers.iter().map(move |p| i / (i + 1.0) * p)
    }

    /// Power of each of the `M−1` weaker rays of every cluster under ICK `i`.
    fn remaining(&self, i: f64) -> impl Iterator<Item = f64> + '_ {
        let m1 = self.m_rays as f64 - 1.0;
        self.powers.iter().map(move |p| p / (i + 1.0) / m1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Situation {
    OrderPreserved,
    OrderChanged,
}

/// Per-cluster power moved onto the dominant ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DifferenceTerms {
    pub alphas: Vec<f64>,
    pub situation: Situation,
}

/// Equal-split ray powers, ascending: `p_{(n−1)M+1} = … = p_{nM} = Pₙ/M`.
pub fn expand_equal(cps: &ClusterPowerSet) -> PowerVector {
    let m = cps.m_rays;
    let powers: Vec<f64> = cps
        .powers
        .iter()
        .flat_map(|p| std::iter::repeat_n(p / m as f64, m))
        .collect();
    PowerVector(powers)
}

/// ICK ray powers in cluster order, dominant ray first (not sorted).
pub fn expand_ick(cps: &ClusterPowerSet, i: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(cps.n_rays());
    for p in &cps.powers {
        out.extend(allocate_ick(*p, cps.m_rays, i)?);
    }
    Ok(out)
}

/// Equal-split Gini as a double sum over clusters and rays.
pub fn g1_closed_form(cps: &ClusterPowerSet) -> f64 {
    let m = cps.m_rays as f64;
    let r = cps.n_rays() as f64;
    let mut acc = 0.0;
    for (n0, p) in cps.powers.iter().enumerate() {
        let n = (n0 + 1) as f64;
        for m_idx in 1..=cps.m_rays {
            acc += p / m * ((r - m * (n - 1.0) - m_idx as f64 + 0.5) / r);
        }
    }
    clamp_unit(1.0 - 2.0 / cps.total() * acc)
}

/// Sum of the Gini weights `(R − pos + ½)/R` over `count` consecutive sorted
/// positions starting at `start` (1-based).
fn block_weight(r: f64, start: usize, count: usize) -> f64 {
    let k = count as f64;
    let s = start as f64;
    (k * (r + 0.5) - (k * s + k * (k - 1.0) / 2.0)) / r
}

/// ICK Gini. The `2N` distinct ray levels are sorted as weighted blocks and
/// each block's Gini weight is summed in closed form, which handles both
/// situations.
pub fn gk_closed_form(cps: &ClusterPowerSet, i: f64) -> f64 {
    let m1 = cps.m_rays - 1;
    let mut levels: Vec<(f64, usize)> = cps
        .remaining(i)
        .map(|v| (v, m1))
        .chain(cps.dominant(i).map(|v| (v, 1)))
        .collect();
    levels.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite power"));
    let r = cps.n_rays() as f64;
    let mut start = 1;
    let mut acc = 0.0;
    for (value, count) in levels {
        acc += value * block_weight(r, start, count);
        start += count;
    }
    clamp_unit(1.0 - 2.0 / cps.total() * acc)
}

/// The ICK Gini with every dominant ray pinned at sorted position `nM`.
/// Correct only when the order is preserved.
pub fn gk_as_printed(cps: &ClusterPowerSet, i: f64) -> f64 {
    let m = cps.m_rays as f64;
    let r = cps.n_rays() as f64;
    let mut acc = 0.0;
    for (n0, p) in cps.powers.iter().enumerate() {
        let n = (n0 + 1) as f64;
        for m_idx in 1..cps.m_rays {
            acc += p / ((i + 1.0) * (m - 1.0)) * ((r - m * (n - 1.0) - m_idx as f64 + 0.5) / r);
        }
        acc += i * p / (i + 1.0) * ((r - m * n + 0.5) / r);
    }
    1.0 - 2.0 / cps.total() * acc
}

/// Order is preserved when each dominant ray stays at or below the weaker
/// rays of the next cluster. Ties sort identically either way and count as
/// preserved.
pub fn classify(cps: &ClusterPowerSet, i: f64) -> Situation {
    let dominant: Vec<f64> = cps.dominant(i).collect();
    let remaining: Vec<f64> = cps.remaining(i).collect();
    let preserved =
        (0..cps.n_clusters().saturating_sub(1)).all(|n| dominant[n] <= remaining[n + 1]);
    if preserved {
        Situation::OrderPreserved
    } else {
        Situation::OrderChanged
    }
}

pub fn difference_terms(cps: &ClusterPowerSet, i: f64) -> DifferenceTerms {
    let m = cps.m_rays as f64;
    let alphas = cps
        .powers
        .iter()
        .zip(cps.remaining(i))
        .map(|(p, rest)| p / m - rest)
        .collect();
    DifferenceTerms {
        alphas,
        situation: classify(cps, i),
    }
}

/// `Σₙ αₙ/‖p‖₁ · (M²−M)/R`, valid when the order is preserved.
pub fn difference_order_preserved(cps: &ClusterPowerSet, i: f64) -> Result<f64> {
    let terms = difference_terms(cps, i);
    if terms.situation != Situation::OrderPreserved {
        return Err(Error::WrongSituation("sort order changes under this ICK"));
    }
    let m = cps.m_rays as f64;
    let r = cps.n_rays() as f64;
    let s = cps.total();
    Ok(terms.alphas.iter().map(|a| a / s * (m * m - m) / r).sum())
}

struct TwoClusterTerms {
    t1: f64,
    t2: f64,
    t3: f64,
    beta_tail: f64,
}

fn two_cluster_terms(cps: &ClusterPowerSet, i: f64) -> Result<TwoClusterTerms> {
    if cps.n_clusters() != 2 {
        return Err(Error::WrongSituation(
            "the two-cluster form needs exactly 2 clusters",
        ));
    }
    let dominant: Vec<f64> = cps.dominant(i).collect();
    let remaining: Vec<f64> = cps.remaining(i).collect();
    if dominant[0] < remaining[1] {
        return Err(Error::WrongSituation(
            "dominant ray of cluster 1 stays below cluster 2",
        ));
    }
    let terms = difference_terms(cps, i);
    let (alpha, beta) = (terms.alphas[0], terms.alphas[1]);
    let m = cps.m_rays;
    let r_usize = cps.n_rays();
    let r = r_usize as f64;
    let s = cps.total();
    let p = expand_equal(cps).into_vec();
    let at = |idx: usize| p[idx - 1];
    let w = |idx: usize| (r - idx as f64 + 0.5) / r;

    let t1 = 2.0 * (1..m).map(|k| alpha / s * w(k)).sum::<f64>();
    let t2 = 2.0
        * (m..=r_usize - 2)
            .map(|k| (at(k) - at(k + 1) + beta) / s * w(k))
            .sum::<f64>();
    let t3 = 2.0 * (at(r_usize - 1) - at(m) - (m as f64 - 1.0) * alpha) / s * (3.0 / (2.0 * r));
    let beta_tail = (m as f64 - 1.0) * beta / s * (1.0 / (2.0 * r));
    Ok(TwoClusterTerms {
        t1,
        t2,
        t3,
        beta_tail,
    })
}

/// Two-cluster difference when the dominant ray of cluster 1 moves to sorted
/// position `R−1`:
///
/// ```text
/// 2Σ_{i=1}^{M−1} α/S·wᵢ + 2Σ_{i=M}^{R−2} (pᵢ − pᵢ₊₁ + β)/S·wᵢ
///   + 2(p_{R−1} − p_M − (M−1)α)/S · 3/(2R) − 2(M−1)β/S · 1/(2R)
/// ```
///
/// with `wᵢ = (R−i+½)/R`. An exact tie between the dominant ray and the
/// other cluster's weaker rays is accepted; both orders give the same sum.
pub fn difference_order_changed(cps: &ClusterPowerSet, i: f64) -> Result<f64> {
    let t = two_cluster_terms(cps, i)?;
    Ok(t.t1 + t.t2 + t.t3 - 2.0 * t.beta_tail)
}

/// The same expression with the last term weighted once instead of twice.
/// Kept to document that this variant does not reproduce `G_k − G_1`.
pub fn difference_order_changed_as_printed(cps: &ClusterPowerSet, i: f64) -> Result<f64> {
    let t = two_cluster_terms(cps, i)?;
    Ok(t.t1 + t.t2 + t.t3 - t.beta_tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub g1: f64,
    pub gk: f64,
    pub delta: f64,
    pub situation: Situation,
    pub holds: bool,
}

/// Evaluates `G_1`, `G_k` and their difference for one instance.
pub fn verify_theorem(cps: &ClusterPowerSet, i: f64) -> Result<TheoremReport> {
    let boundary = equal_split_ick(cps.m_rays);
    if !(i >= boundary * (1.0 - 1e-12)) || !i.is_finite() {
        return Err(Error::invalid(
            "ick",
            format!("{i} is below 1/(M-1) = {boundary}"),
        ));
    }
    let g1 = g1_closed_form(cps);
    let gk = gk_closed_form(cps, i);
    let delta = gk - g1;
    Ok(TheoremReport {
        g1,
        gk,
        delta,
        situation: classify(cps, i),
        holds: delta >= -DELTA_TOLERANCE,
    })
}

/// One randomized instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub powers: Vec<f64>,
    pub m_rays: usize,
    pub ick: f64,
}

impl Instance {
    pub fn cluster_set(&self) -> ClusterPowerSet {
        ClusterPowerSet::new(self.powers.clone(), self.m_rays).expect("generated instance is valid")
    }
}

/// Random instance: `N ∈ [1, 12]`, `M ∈ [2, 25]`, cluster powers log-uniform
/// over four decades (ties nudged apart by a relative 1e-9), ICK log-uniform
/// in `[1/(M−1), 10⁴]`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> Instance {
    let n = rng.random_range(1..=12);
    let m_rays = rng.random_range(2..=25);
    let mut powers: Vec<f64> = (0..n)
        .map(|_| 10f64.powf(rng.random_range(-4.0..0.0)))
        .collect();
    powers.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for k in 1..powers.len() {
        if powers[k] <= powers[k - 1] {
            powers[k] = powers[k - 1] * (1.0 + 1e-9);
        }
    }
    let lo = equal_split_ick(m_rays).ln();
    let hi = 1e4f64.ln();
    let ick = rng.random_range(lo..=hi).exp();
    Instance {
        powers,
        m_rays,
        ick,
    }
}

/// Summary of a randomized sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub cases: usize,
    pub counterexamples: usize,
    pub order_preserved: usize,
    pub order_changed: usize,
    /// Smallest `G_k − G_1` over instances with `I > 1/(M−1)`.
    pub min_delta: f64,
    /// Largest `|G_k − G_1|` at `I = 1/(M−1)`.
    pub max_boundary_delta: f64,
    /// Largest `|closed form − Gini of the explicit vector|`.
    pub max_g1_oracle_error: f64,
    pub max_gk_oracle_error: f64,
    /// Largest mismatch between the situation-specific difference formula and
    /// `G_k − G_1` (order preserved for any `N`, order changed for `N = 2`).
    pub max_difference_formula_error: f64,
    pub worst_case: Option<Instance>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.counterexamples == 0
    }
}

/// Runs `cases` random instances from a fixed seed. Each instance is checked
/// at its drawn ICK and at the boundary `1/(M−1)`.
pub fn theorem_sweep(cases: usize, seed: u64) -> SweepReport {
    let mut rng = aux_rng(seed, 0x7468_656f);
    let mut report = SweepReport {
        seed,
        cases,
        counterexamples: 0,
        order_preserved: 0,
        order_changed: 0,
        min_delta: f64::INFINITY,
        max_boundary_delta: 0.0,
        max_g1_oracle_error: 0.0,
        max_gk_oracle_error: 0.0,
        max_difference_formula_error: 0.0,
        worst_case: None,
    };
    for _ in 0..cases {
        let inst = random_instance(&mut rng);
        let cps = inst.cluster_set();

        let g1_direct = gini(&expand_equal(&cps));
        let ick_vec =
            sort_ascending(&expand_ick(&cps, inst.ick).expect("M >= 2")).expect("positive");
        let gk_direct = gini(&ick_vec);

        let rep = verify_theorem(&cps, inst.ick).expect("ICK within range");
        report.max_g1_oracle_error = report.max_g1_oracle_error.max((rep.g1 - g1_direct).abs());
        report.max_gk_oracle_error = report.max_gk_oracle_error.max((rep.gk - gk_direct).abs());

        let formula = match rep.situation {
            Situation::OrderPreserved => {
                report.order_preserved += 1;
                difference_order_preserved(&cps, inst.ick).ok()
            }
            Situation::OrderChanged => {
                report.order_changed += 1;
                difference_order_changed(&cps, inst.ick).ok()
            }
        };
        if let Some(f) = formula {
            report.max_difference_formula_error = report
                .max_difference_formula_error
                .max((f - rep.delta).abs());
        }

        let strictly_inside = inst.ick > equal_split_ick(inst.m_rays);
        if !rep.holds || (strictly_inside && rep.delta <= 0.0) {
            report.counterexamples += 1;
        }
        if strictly_inside && rep.delta < report.min_delta {
            report.min_delta = rep.delta;
            report.worst_case = Some(inst.clone());
        }

        let at_boundary = verify_theorem(&cps, equal_split_ick(inst.m_rays)).expect("boundary");
        report.max_boundary_delta = report.max_boundary_delta.max(at_boundary.delta.abs());
        if at_boundary.delta.abs() > DELTA_TOLERANCE {
            report.counterexamples += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gini::gini_of;

    fn cps(p: &[f64], m: usize) -> ClusterPowerSet {
        ClusterPowerSet::new(p.to_vec(), m).unwrap()
    }

    #[test]
    fn rejects_invalid_sets() {
        assert!(ClusterPowerSet::new(vec![], 2).is_err());
        assert!(ClusterPowerSet::new(vec![1.0], 1).is_err());
        assert!(ClusterPowerSet::new(vec![2.0, 1.0], 2).is_err());
        assert!(ClusterPowerSet::new(vec![1.0, 1.0], 2).is_err());
        assert!(ClusterPowerSet::new(vec![0.0, 1.0], 2).is_err());
    }

    #[test]
    fn expand_equal_examples() {
        assert_eq!(expand_equal(&cps(&[1.0], 2)).as_slice(), &[0.5, 0.5]);
        assert_eq!(
            expand_equal(&cps(&[1.0, 3.0], 2)).as_slice(),
            &[0.5, 0.5, 1.5, 1.5]
        );
        assert_eq!(expand_equal(&cps(&[0.1, 0.2, 0.3], 7)).len(), 21);
    }

    #[test]
    fn g1_examples() {
        assert!(g1_closed_form(&cps(&[0.37], 20)).abs() < 1e-12);
        let direct = gini_of(&[0.5, 0.5, 1.5, 1.5]).unwrap();
        assert!((g1_closed_form(&cps(&[1.0, 3.0], 2)) - direct).abs() < 1e-12);
    }

    #[test]
    fn gk_examples() {
        let c = cps(&[1.0, 3.0], 2);
        assert!((gk_closed_form(&c, 1.0) - g1_closed_form(&c)).abs() < 1e-12);
        let direct = gini_of(&[0.2, 0.6, 0.8, 2.4]).unwrap();
        assert!((gk_closed_form(&c, 4.0) - direct).abs() < 1e-12);
        assert_eq!(classify(&c, 4.0), Situation::OrderChanged);
    }

    #[test]
    fn printed_gk_agrees_only_when_order_preserved() {
        let c = cps(&[1e-4, 1e-2, 1.0], 10);
        assert_eq!(classify(&c, 5.0), Situation::OrderPreserved);
        assert!((gk_as_printed(&c, 5.0) - gk_closed_form(&c, 5.0)).abs() < 1e-12);

        let c = cps(&[1.0, 3.0], 2);
        assert!((gk_as_printed(&c, 4.0) - gk_closed_form(&c, 4.0)).abs() > 1e-6);
    }

    #[test]
    fn preserved_difference() {
        let c = cps(&[1e-4, 1e-2, 1.0], 10);
        assert!(difference_order_preserved(&c, 1.0 / 9.0).unwrap().abs() < 1e-15);
        let d = difference_order_preserved(&c, 5.0).unwrap();
        assert!(d > 0.0);
        assert!((d - (gk_closed_form(&c, 5.0) - g1_closed_form(&c))).abs() < 1e-12);

        let changed = cps(&[1.0, 1.05], 20);
        assert!(matches!(
            difference_order_preserved(&changed, 100.0),
            Err(Error::WrongSituation(_))
        ));
    }

    #[test]
    fn changed_difference_two_clusters() {
        let c = cps(&[1.0, 1.05], 20);
        for i in [1.0, 10.0, 1e3] {
            assert_eq!(classify(&c, i), Situation::OrderChanged);
            let d = difference_order_changed(&c, i).unwrap();
            let direct = gini_of(&expand_ick(&c, i).unwrap()).unwrap() - g1_closed_form(&c);
            assert!(d > 0.0);
            assert!((d - direct).abs() < 1e-12, "{d} vs {direct}");
            let printed = difference_order_changed_as_printed(&c, i).unwrap();
            assert!((printed - direct).abs() > 1e-6);
        }
    }

    #[test]
    fn changed_difference_at_exact_tie() {
        // dominant of cluster 1 = I/(I+1)·P1, remaining of cluster 2 =
        // P2/((I+1)(M−1)); with M = 2 they tie when P2 = I·P1.
        let c = cps(&[1.0, 4.0], 2);
        let i = 4.0;
        assert_eq!(classify(&c, i), Situation::OrderPreserved);
        let changed = difference_order_changed(&c, i).unwrap();
        let preserved = difference_order_preserved(&c, i).unwrap();
        let direct = gini_of(&expand_ick(&c, i).unwrap()).unwrap() - g1_closed_form(&c);
        assert!((changed - direct).abs() < 1e-12);
        assert!((preserved - direct).abs() < 1e-12);
    }

    #[test]
    fn changed_difference_preconditions() {
        assert!(difference_order_changed(&cps(&[1.0, 2.0, 3.0], 5), 10.0).is_err());
        let c = cps(&[0.001, 1.0], 20);
        assert!(difference_order_changed(&c, 2.0).is_err());
        // The boundary never reorders.
        let c = cps(&[1.0, 1.0001], 20);
        assert_eq!(classify(&c, 1.0 / 19.0), Situation::OrderPreserved);
    }

    #[test]
    fn theorem_examples() {
        let c = cps(&[0.2, 0.5, 0.9], 20);
        let at = verify_theorem(&c, 1.0 / 19.0).unwrap();
        assert!(at.delta.abs() < 1e-12);
        assert!(at.holds);
        let single = cps(&[0.7], 20);
        let rep = verify_theorem(&single, 3.0).unwrap();
        assert!(rep.delta > 0.0);
        let expected = difference_order_preserved(&single, 3.0).unwrap();
        assert!((rep.delta - expected).abs() < 1e-12);
        assert!(verify_theorem(&c, 0.01).is_err());
    }

    #[test]
    fn small_sweep_is_clean() {
        let r = theorem_sweep(500, 1);
        assert!(r.passed(), "{r:?}");
        assert!(r.min_delta > 0.0);
        assert!(r.max_g1_oracle_error < 1e-12);
        assert!(r.max_gk_oracle_error < 1e-12);
        assert!(r.max_difference_formula_error < 1e-12);
        assert_eq!(r.order_preserved + r.order_changed, 500);
    }

    #[test]
    fn sweep_is_deterministic() {
        assert_eq!(theorem_sweep(200, 9), theorem_sweep(200, 9));
    }
}
