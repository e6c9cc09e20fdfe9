//! Cluster-delay-line drop generation.
//!
//! A drop is built in four steps: large-scale parameters (delay spread,
//! K-factor, cluster count), cluster delays from the delay spread, cluster
//! powers from the delays with lognormal shadowing and the LoS split, and
//! finally the split of every cluster's power over its rays.

mod alloc;
mod coeff;
mod config;
mod drop;
mod profile;
mod steps;

pub use alloc::{allocate_equal, allocate_ick, equal_split_ick, Allocation};
pub use coeff::{cluster_response, synthesize_coefficients, ClusterCoefficients, RayCoefficient};
pub use config::{GenConfig, LosInjection};
pub use drop::{generate_drop, generate_drop_detail, DropDetail};
pub use profile::{db_to_linear, linear_to_db, BandProfile};
pub use steps::{
    cluster_delays_from_uniforms, cluster_powers_from_shadowing, draw_lsp, gen_cluster_delays,
    gen_cluster_powers, ClusterPowers, LspDraw, K_CAP_DB,
};
