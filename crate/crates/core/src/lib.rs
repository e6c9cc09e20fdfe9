//! Stochastic cluster-delay-line channel generation and Gini-index sparsity
//! analysis, with an intra-cluster K-factor (ICK) power allocation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod extract;
pub mod formats;
pub mod gini;
pub mod rng;
pub mod theory;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    AllocationMode, Band, ChannelRealization, Cluster, GiniSample, LosVariant, PowerVector, Ray,
};
