//! PAC-Bayesian bounds for a finite set of classifiers.
//!
//! Given empirical risks `lhat_i` measured on `m` examples, the crate
//! evaluates five bound families (linear, squared, Pinsker, sixth-degree
//! polynomial and binary kl), computes the threshold constants that enter
//! them, and finds the posterior minimizing each bound.

pub mod bounds;
pub mod cli;
pub mod distance;
pub mod error;
pub mod harness;
pub mod klinverse;
pub mod optimize;
pub mod special;
pub mod types;

pub use bounds::{evaluate_bound, kl_divergence, rch, rch_derivative, BoundEvaluator};
pub use distance::{binary_kl, phi_eval};
pub use error::{Error, Result};
pub use klinverse::{kl_lower_root, kl_upper_root, KlRoot, KlRootRequest};
pub use optimize::{
    fp_solve, fp_step, grid_oracle, optimal_posterior_linear, prefix_search,
    stationarity_residual, PrefixSearchResult,
};
pub use special::{ik_constant, log_sum_exp, IkResult};
pub use types::{
    BoundSpec, BoundValue, ClassifierEntry, ConstantPolicy, DiscreteDistribution, DistanceKind,
    FixedPointConfig, Init, PosteriorResult, RiskProfile,
};
