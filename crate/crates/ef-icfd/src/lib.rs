//! Envy-free allocation of connected bundles on graphs.
//!
//! The library solves the following problem exactly and approximately:
//! given an item graph, additive agent valuations over its vertices and
//! a budget `p`, allocate exactly `p` vertices so every bundle induces a
//! connected subgraph and no agent values another bundle above its own.
//! Two settings differ in whether empty bundles are allowed.
//!
//! - [`epas::solve_epas`] — the parameterized approximation scheme:
//!   returns a valid, `(1 + eps)`-envy-free allocation or certifies that
//!   no valid, exactly envy-free allocation exists.
//! - [`exact`] — brute-force ground truth for small instances.
//! - [`verify`] — exact validity and envy checks.
//! - [`motif`] — the maximum-weight connected colorful subgraph engine
//!   inside the scheme's subroutine.
//! - [`gen`] — instance generators, including the star-graph hardness
//!   construction from vector-sum inputs.
//!
//! All arithmetic is exact (big integers and rationals); the crate uses
//! no floating point in any decision.

pub mod epas;
pub mod error;
pub mod exact;
pub mod gen;
pub mod instance;
pub mod io;
pub mod motif;
pub mod numerics;
pub mod verify;

pub use epas::{solve_epas, SolveOptions, SolveOutcome, SolveStats};
pub use error::{Error, Result};
pub use exact::{enumerate_ef, solve_exact, solve_vector_sum, VectorSumInstance};
pub use instance::{Allocation, Instance, Setting};
pub use numerics::{ApproxParams, Rational};
pub use verify::{verify, VerificationReport};
