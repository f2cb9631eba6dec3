//! Entanglement detection from local symmetric measurements.
//!
//! The crate builds informationally complete symmetric (N,M)-POVMs from a
//! traceless Gell-Mann basis, collects the joint outcome probabilities of a
//! bipartite or multipartite state into a correlation matrix, borders it with
//! marginal-probability blocks and two free real vectors, and compares the
//! trace norm of the result with the bound every separable state obeys.
//!
//! Layout:
//!
//! - [`linalg`]: dense complex matrix kernel (Kronecker product, partial trace,
//!   singular values, trace norm, Hermitian spectra).
//! - [`basis`]: generalized Gell-Mann operators and their (N, M-1) grouping.
//! - [`povm`]: the measurement operators, their trace constants, coincidence
//!   index and dual frame.
//! - [`state`]: density matrices, the example states and seeded random states.
//! - [`criterion`]: correlation matrices, the augmented matrix and the
//!   bipartite / multipartite criteria.
//! - [`sweep`]: one-parameter sweeps and bisection thresholds.
//! - [`reproduce`]: the pinned example configurations and their CSV output.

pub mod basis;
pub mod criterion;
mod error;
pub mod linalg;
pub mod povm;
pub mod reproduce;
pub mod state;
pub mod sweep;

pub use basis::{gell_mann_basis, GellMann, OperatorBasisLayout};
pub use criterion::{
    augmented_matrix, evaluate_baseline_equal_entries, evaluate_bipartite, evaluate_gsic,
    evaluate_multipartite, evaluate_mum, marginal_vector, probability_matrix,
    probability_matrix_bipartition, theorem1_bound, theorem2_bound, AugmentedMatrix,
    CorrelationMatrix, Criterion, CriterionReport, MarginalVector, PovmParams,
};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use povm::{coincidence_bound, x_of_t, DualFrame, SymmetricPovm, TRange};
pub use state::DensityMatrix;
pub use sweep::{threshold_solve, SweepResult, SweepRow, Threshold};

/// Environment variable read by [`env_seed`].
pub const SEED_ENV: &str = "SYMSEP_SEED";

/// Seed for randomized checks: `SYMSEP_SEED` when set and parseable, else `default`.
pub fn env_seed(default: u64) -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}
