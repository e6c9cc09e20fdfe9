//! Intra-cluster power allocation.
//!
//! The baseline splits a cluster's power equally over its `M` rays. The ICK
//! allocation gives ray 1 the share `I/(I+1)` and spreads the remainder
//! equally over rays `2..=M`, so that `I = p_max / (P − p_max)` holds exactly.
//! At `I = 1/(M−1)` both allocations coincide.

use crate::error::{Error, Result};

/// Allocation rule for one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Allocation {
    Equal,
    /// Linear intra-cluster K-factor.
    Ick(f64),
}

impl Allocation {
    pub fn apply(self, cluster_power: f64, m: usize) -> Result<Vec<f64>> {
        match self {
            Allocation::Equal => Ok(allocate_equal(cluster_power, m)),
            Allocation::Ick(i) => allocate_ick(cluster_power, m, i),
        }
    }
}

pub fn allocate_equal(cluster_power: f64, m: usize) -> Vec<f64> {
    debug_assert!(m >= 1);
    vec![cluster_power / m as f64; m]
}

/// Dominant ray first.
pub fn allocate_ick(cluster_power: f64, m: usize, ick: f64) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::IckNeedsTwoRays(m));
    }
    if !(ick > 0.0) || !ick.is_finite() {
        return Err(Error::invalid("ick", format!("{ick} is not > 0")));
    }
    let dominant = ick / (ick + 1.0) * cluster_power;
    let rest = cluster_power / (ick + 1.0) / (m - 1) as f64;
    let mut out = Vec::with_capacity(m);
    out.push(dominant);
    out.extend(std::iter::repeat_n(rest, m - 1));
    Ok(out)
}

/// The ICK at which the ICK allocation equals the equal split.
pub fn equal_split_ick(m: usize) -> f64 {
    1.0 / (m as f64 - 1.0)
}
