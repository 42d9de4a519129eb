//! Solver library for extending partially specified latin-style arrays.
//!
//! An instance is an `r×s` array over symbols `1..=k`, latin in rows and
//! columns, where symbol `ℓ` may appear at most `ρ_ℓ` times, together
//! with a target order `n` such that `Σ ρ_ℓ = n²`. The library decides
//! whether the array extends to an `n×n` array in which symbol `ℓ`
//! appears exactly `ρ_ℓ` times, constructs the extension when it exists,
//! and cross-validates the decision three independent ways:
//!
//! * a flow-based transfer-subgraph feasibility check ([`factor`],
//!   [`complete`]),
//! * exhaustive subset-condition evaluators for the published
//!   characterizations ([`conditions`]),
//! * a brute-force backtracking oracle ([`oracle`]).
//!
//! The [`audit`] module sweeps randomized instances through all three
//! and reports any disagreement.

pub mod audit;
pub mod complete;
pub mod conditions;
pub mod detach;
pub mod factor;
mod flow;
pub mod graph;
pub mod guards;
pub mod model;
pub mod oracle;

pub use complete::{complete, complete_hall, generate_square, CompleteOutcome};
pub use guards::Guards;
pub use model::{monus, ModelError, MuStats, PSets, Rectangle, RhoProfile, Square};
