//! Gini index over multipath powers.
//!
//! For powers `p₁ ≤ … ≤ p_R` sorted ascending,
//!
//! ```text
//! G = 1 − 2 Σᵢ (pᵢ / ‖p‖₁) · (R − i + ½) / R
//! ```
//!
//! `G = 0` when every ray carries the same power and `G → (R−1)/R` when one ray
//! holds all of it. The metric is scale invariant, permutation invariant and
//! invariant under replicating every element the same number of times.

use crate::error::{Error, Result};
use crate::types::{ChannelRealization, GiniSample, LosVariant, PowerVector};

/// Slack tolerated outside [0, 1] before a result counts as a bug rather than
/// rounding.
const CLAMP_SLACK: f64 = 1e-12;

/// Stable ascending sort with validation. Equal powers keep their input order.
pub fn sort_ascending(powers: &[f64]) -> Result<PowerVector> {
    if powers.is_empty() {
        return Err(Error::EmptyPowerVector);
    }
    if let Some((idx, &p)) = powers
        .iter()
        .enumerate()
        .find(|(_, p)| !(**p > 0.0) || !p.is_finite())
    {
        return Err(Error::NonpositivePower(p, idx));
    }
    let mut sorted = powers.to_vec();
    // `sort_by` is stable; NaN was rejected above.
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    Ok(PowerVector(sorted))
}

/// Gini index of an ascending power vector.
pub fn gini(v: &PowerVector) -> f64 {
    let powers = v.as_slice();
    let n = powers.len();
    // Same value as `1 − 2 Σ (pᵢ/‖p‖₁)(R − i + ½)/R`, rearranged to
    // `Σ (2i − R − 1) pᵢ / (R ‖p‖₁)` so nothing is subtracted from 1 and an
    // equal-power vector lands on zero up to a few ulps of its own scale.
    let centred: f64 = powers
        .iter()
        .enumerate()
        .map(|(idx, p)| ((2 * idx + 1) as f64 - n as f64) * p)
        .sum();
    clamp_unit(centred / (n as f64 * v.total()))
}

/// Sorts and evaluates in one step.
pub fn gini_of(powers: &[f64]) -> Result<f64> {
    Ok(gini(&sort_ascending(powers)?))
}

pub(crate) fn clamp_unit(g: f64) -> f64 {
    debug_assert!(
        (-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&g),
        "Gini {g} outside [0, 1] beyond rounding slack"
    );
    g.clamp(0.0, 1.0)
}

/// Powers entering a Gini evaluation for the requested LoS variant.
pub fn variant_powers(r: &ChannelRealization, variant: LosVariant) -> Result<Vec<f64>> {
    if r.rays.len() < 2 {
        return Err(Error::DegenerateRaySet(r.rays.len()));
    }
    let powers: Vec<f64> = match variant {
        LosVariant::WithLos => r.powers(),
        LosVariant::WithoutLos => {
            if !r.has_los || r.los_ray().is_none() {
                return Err(Error::NoLosRay);
            }
            r.rays
                .iter()
                .filter(|ray| !ray.is_los)
                .map(|ray| ray.power)
                .collect()
        }
    };
    if powers.len() < 2 {
        return Err(Error::DegenerateRaySet(powers.len()));
    }
    Ok(powers)
}

/// Gini of one realization. `WithoutLos` drops the flagged LoS ray, which
/// is not necessarily the strongest one.
pub fn gini_realization(r: &ChannelRealization, variant: LosVariant) -> Result<GiniSample> {
    let value = gini_of(&variant_powers(r, variant)?)?;
    Ok(GiniSample {
        value,
        drop_index: r.drop_index,
        variant,
        mode: r.mode,
    })
}

/// Gini over the rays of several realizations pooled together, each one first
/// normalized to unit power. This is the per-position aggregation; the
/// per-realization value from [`gini_realization`] is the default sample unit.
pub fn gini_pooled(realizations: &[ChannelRealization], variant: LosVariant) -> Result<f64> {
    let mut pooled = Vec::new();
    for r in realizations {
        let powers = variant_powers(r, variant)?;
        let total: f64 = powers.iter().sum();
        pooled.extend(powers.into_iter().map(|p| p / total));
    }
    gini_of(&pooled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AllocationMode, Band, Ray};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Mean-absolute-difference form, no sorting involved.
    fn oracle(p: &[f64]) -> f64 {
        let r = p.len() as f64;
        let s: f64 = p.iter().sum();
        let mut acc = 0.0;
        for a in p {
            for b in p {
                acc += (a - b).abs();
            }
        }
        acc / (2.0 * r * s)
    }

    fn realization(rays: Vec<Ray>) -> ChannelRealization {
        let has_los = rays.iter().any(|r| r.is_los);
        ChannelRealization {
            rays,
            band: Band::SubThz,
            has_los,
            seed: 0,
            drop_index: 7,
            mode: AllocationMode::Equal,
        }
    }

    #[test]
    fn oracle_agrees_on_hand_example() {
        // 1 − 2·(0.25·0.75 + 0.75·0.25) = 0.25
        assert!((oracle(&[1.0, 3.0]) - 0.25).abs() < 1e-15);
        assert!((gini_of(&[1.0, 3.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((gini_of(&[3.0, 1.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn equal_powers_give_zero() {
        assert!(gini_of(&[1.0, 1.0, 1.0, 1.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn single_dominant_limit() {
        let d = 1e-15;
        let g = gini_of(&[d, d, d, 1.0]).unwrap();
        assert!((g - 0.75).abs() < 1e-12, "{g}");
    }

    #[test]
    fn single_element_is_zero() {
        assert_eq!(gini_of(&[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(gini_of(&[]), Err(Error::EmptyPowerVector));
        assert_eq!(gini_of(&[1.0, 0.0]), Err(Error::NonpositivePower(0.0, 1)));
        assert!(matches!(
            gini_of(&[1.0, -2.0]),
            Err(Error::NonpositivePower(..))
        ));
        assert!(matches!(
            gini_of(&[f64::NAN]),
            Err(Error::NonpositivePower(..))
        ));
    }

    #[test]
    fn sort_is_stable_ascending() {
        assert_eq!(
            sort_ascending(&[3.0, 1.0, 2.0]).unwrap().as_slice(),
            &[1.0, 2.0, 3.0]
        );
        assert_eq!(sort_ascending(&[1.0]).unwrap().as_slice(), &[1.0]);
        assert_eq!(
            sort_ascending(&[2.0, 2.0, 1.0]).unwrap().as_slice(),
            &[1.0, 2.0, 2.0]
        );
    }

    #[test]
    fn swapping_tied_elements_changes_nothing() {
        let a = [0.5, 2.0, 2.0, 7.0];
        let mut b = a;
        b.swap(1, 2);
        assert_eq!(gini_of(&a).unwrap(), gini_of(&b).unwrap());
    }

    #[test]
    fn realization_variants() {
        let nlos = 0.1 / 9.0;
        let mut rays = vec![Ray::new(0.0, 0.9).los()];
        rays.extend((1..10).map(|k| Ray::new(k as f64 * 1e-9, nlos)));
        let r = realization(rays);

        let with = gini_realization(&r, LosVariant::WithLos).unwrap();
        assert_eq!(with.value, gini_of(&r.powers()).unwrap());
        assert_eq!(with.drop_index, 7);

        let without = gini_realization(&r, LosVariant::WithoutLos).unwrap();
        assert!(without.value.abs() < 1e-12);
    }

    #[test]
    fn without_los_removes_flagged_ray_not_strongest() {
        let r = realization(vec![
            Ray::new(0.0, 0.2).los(),
            Ray::new(1e-9, 0.7),
            Ray::new(2e-9, 0.1),
        ]);
        let g = gini_realization(&r, LosVariant::WithoutLos).unwrap().value;
        assert!((g - gini_of(&[0.7, 0.1]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn realization_errors() {
        let r = realization(vec![Ray::new(0.0, 1.0), Ray::new(0.0, 2.0)]);
        assert_eq!(
            gini_realization(&r, LosVariant::WithoutLos),
            Err(Error::NoLosRay)
        );

        let r = realization(vec![Ray::new(0.0, 1.0).los(), Ray::new(0.0, 2.0)]);
        assert_eq!(
            gini_realization(&r, LosVariant::WithoutLos),
            Err(Error::DegenerateRaySet(1))
        );

        let r = realization(vec![Ray::new(0.0, 1.0)]);
        assert_eq!(
            gini_realization(&r, LosVariant::WithLos),
            Err(Error::DegenerateRaySet(1))
        );
    }

    #[test]
    fn random_fifty_ray_realization_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let rays: Vec<Ray> = (0..50)
            .map(|k| Ray::new(k as f64 * 1e-9, 10f64.powf(rng.random_range(-4.0..0.0))))
            .collect();
        let r = realization(rays);
        let g = gini_realization(&r, LosVariant::WithLos).unwrap().value;
        assert!((g - oracle(&r.powers())).abs() < 1e-12);
    }

    #[test]
    fn pooled_equals_per_drop_for_one_realization() {
        let r = realization(vec![
            Ray::new(0.0, 0.6).los(),
            Ray::new(1e-9, 0.3),
            Ray::new(2e-9, 0.1),
        ]);
        let single = gini_realization(&r, LosVariant::WithLos).unwrap().value;
        let pooled = gini_pooled(std::slice::from_ref(&r), LosVariant::WithLos).unwrap();
        assert!((single - pooled).abs() < 1e-15);
        // Two identical snapshots pooled: replication invariance.
        let pooled2 = gini_pooled(&[r.clone(), r], LosVariant::WithLos).unwrap();
        assert!((single - pooled2).abs() < 1e-12);
    }
}
