//! Theorem-level bound checks, exhaustive verification over small grids and
//! the extremal-family search.

mod bounds;
mod exhaustive;
mod search;
mod tracker;

pub use bounds::{bound_value, check_bound, BoundReport, Theorem};
pub use exhaustive::{exhaustive_verify, ExhaustiveSummary, Violation, MAX_EXHAUSTIVE_UNIVERSE};
pub use search::{
    derive_seed, random_uniform_family, search_extremal, ConjectureStatus, SearchConfig, SearchEvent,
    SearchState, Strategy,
};
pub use tracker::{DeltaTracker, ShatterGuard};
