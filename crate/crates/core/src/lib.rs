//! Partial-update augmented complex LMS (PU-ACLMS) adaptive filtering.
//!
//! The crate contains four layers:
//!
//! - [`algebra`]: dense complex matrices, Kronecker/vectorization helpers,
//!   Hermitian and general eigensolvers, LU solves.
//! - [`signal`]: reproducible RNG streams, non-circular complex Gaussian
//!   noise, the widely-linear AR input process, and the widely-linear plant.
//! - [`filter`]: the ACLMS/PU-ACLMS recursions, sequential and stochastic
//!   coefficient-selection schedules, per-step audits, the exact
//!   energy-conservation check, and complexity accounting.
//! - [`theory`]: second-order statistics estimation, steady-state EMSE/MSD
//!   predictors, mean and mean-square stability bounds, learning-curve
//!   recursions, and decay-rate comparison.
//! - [`harness`]: Monte-Carlo experiments, theory/simulation overlays, CSV
//!   emission, and the command-line interface in [`cli`].

pub mod algebra;
pub mod filter;
pub mod harness;
pub mod signal;
pub mod theory;
