//! Upper bounds on average kissing numbers.
//!
//! The average kissing number `k_d` is the supremum of the average degree
//! of contact graphs of ball packings in `R^d`. This crate computes and
//! certifies upper bounds on it:
//!
//! * [`caps`] holds the closed-form spherical cap geometry shared by every
//!   other module.
//! * [`highdim`] evaluates the area bound `a(d)` for any dimension.
//! * [`density`] maximizes the triangle density over the cap-radius cube and
//!   sweeps the inflation ratio.
//! * [`certifier`] verifies a density bound over a uniform subdivision of the
//!   cube and produces a machine-checkable [`certifier::Certificate`].
//! * [`packing`] ingests concrete packings, extracts their contact graphs and
//!   audits the coverage inequalities on them.

pub mod caps;
pub mod certifier;
pub mod config;
pub mod density;
mod error;
pub mod highdim;
pub mod packing;
mod quadrature;
pub mod report;
mod simplex;

pub use error::{Error, Result};
