use serde::{Deserialize, Serialize};

use crate::channel::linear_to_db;
use crate::error::{Error, Result};
use crate::types::{Cluster, Ray};

/// `max(p) / (Σp − max(p))` over the cluster's rays.
pub fn estimate_ick(c: &Cluster) -> Result<f64> {
    ick_of(&c.powers())
}

pub(crate) fn ick_of(powers: &[f64]) -> Result<f64> {
    if powers.len() < 2 {
        return Err(Error::IckUndefined);
    }
    let (top, max) = powers
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::MIN),
            |best, (k, p)| if p > best.1 { (k, p) } else { best },
        );
    // Summing the others directly avoids cancellation in `Σp − max` when the
    // dominant ray holds nearly all the power.
    let rest: f64 = powers
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != top)
        .map(|(_, p)| p)
        .sum();
    if !(rest > 0.0) {
        return Err(Error::IckUndefined);
    }
    Ok(max / rest)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LspEstimate {
    /// Power-weighted rms delay spread.
    pub ds_s: f64,
    /// Strongest ray over the sum of all others.
    pub k_db: f64,
}

pub fn estimate_lsp(rays: &[Ray]) -> Result<LspEstimate> {
    if rays.len() < 2 {
        return Err(Error::invalid(
            "rays",
            format!("need at least 2 rays, got {}", rays.len()),
        ));
    }
    for r in rays {
        r.validate()?;
    }
    let total: f64 = rays.iter().map(|r| r.power).sum();
    let mean = rays.iter().map(|r| r.power * r.delay_s).sum::<f64>() / total;
    let second = rays
        .iter()
        .map(|r| r.power * (r.delay_s - mean).powi(2))
        .sum::<f64>()
        / total;
    let powers: Vec<f64> = rays.iter().map(|r| r.power).collect();
    Ok(LspEstimate {
        ds_s: second.max(0.0).sqrt(),
        k_db: linear_to_db(ick_of(&powers)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::allocate_ick;

    fn cluster(powers: &[f64]) -> Cluster {
        Cluster::new(
            powers
                .iter()
                .enumerate()
                .map(|(i, p)| Ray::new(i as f64 * 1e-9, *p))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ick_examples() {
        assert_eq!(estimate_ick(&cluster(&[8.0, 1.0, 1.0])).unwrap(), 4.0);
        assert_eq!(estimate_ick(&cluster(&[1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(estimate_ick(&cluster(&[3.0])), Err(Error::IckUndefined));
    }

    #[test]
    fn ick_inverts_allocation() {
        let v = allocate_ick(1.0, 20, 62.95).unwrap();
        let i = estimate_ick(&cluster(&v)).unwrap();
        assert!((i - 62.95).abs() <= 1e-12 * 62.95);
    }

    #[test]
    fn lsp_examples() {
        let tau = 7e-9;
        let est = estimate_lsp(&[Ray::new(0.0, 1.0), Ray::new(2.0 * tau, 1.0)]).unwrap();
        assert!((est.ds_s - tau).abs() < 1e-20);
        assert!(est.k_db.abs() < 1e-12);
        let est = estimate_lsp(&[Ray::new(0.0, 1.0), Ray::new(1e-9, 1e-9)]).unwrap();
        assert!((est.k_db - 90.0).abs() < 1e-6);
        assert!(estimate_lsp(&[Ray::new(0.0, 1.0)]).is_err());
    }
}
