//! Default parameters for every experiment.
//!
//! The CLI exposes each of these as a flag; nothing else reads them from the
//! environment.

/// Inflation ratio used for the three-dimensional certificate.
pub const RHO: f64 = 1.755;

/// Side length of the certification cubes, in radians.
pub const DELTA: f64 = 0.0005;

/// Target the certified `k_3` bound must stay below.
pub const TARGET: f64 = 13.955;

/// Relative inflation applied to the certified bound to absorb rounding in
/// the elementary functions.
pub const FP_SLACK: f64 = 1e-9;

/// Spacing of the multistart grid for the density search, in radians.
pub const START_STEP: f64 = 0.05;

/// Convergence tolerance of the local simplex search (simplex size and value
/// spread).
pub const LOCAL_TOLERANCE: f64 = 1e-10;

/// Iteration cap for one local simplex search.
pub const LOCAL_MAX_ITERATIONS: usize = 20_000;

/// Number of boxes between two certification checkpoints.
pub const CHECKPOINT_EVERY: u64 = 10_000_000;

/// Threshold of the pruning predicate used to discard inflation ratios.
pub const PRUNE_THRESHOLD: f64 = 14.0;

/// Relative tolerance under which two balls count as tangent.
pub const TANGENCY_TOLERANCE: f64 = 1e-9;

/// Slack allowed on an `arccos` argument before it is treated as invalid
/// geometry rather than round-off.
pub const ACOS_GUARD: f64 = 1e-12;

/// Environment variable that sets the worker count of the CLI.
pub const THREADS_ENV: &str = "KISSBOUND_THREADS";
