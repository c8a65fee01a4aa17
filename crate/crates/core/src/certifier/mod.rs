//! Rigorous verification of a density bound over the cap-radius cube.
//!
//! The cube `[alpha_min, alpha_max]^3` is tiled by boxes of side `delta`
//! (the last box on each axis is shrunk to fit). Over a box the density is
//! bounded by
//!
//! ```text
//! max D <= (max K(x) max ∠x + max K(y) max ∠y + max K(z) max ∠z) / (2π min area)
//! ```
//!
//! where each extremum sits at a known corner: the area is smallest at the
//! lower corner, `K` is largest at the upper end of its axis, and `∠x` is
//! largest at `(a, b+δ, c+δ)` while `2x+y+z <= π` over the box, at the upper
//! corner once `2x+y+z >= π`, and at one of the two in between. Only boxes
//! with `a <= b <= c` are visited since the density is symmetric.
//!
//! Results are rigorous up to IEEE rounding in the elementary functions,
//! which the relative `fp_slack` on the final bound absorbs.

mod audit;
mod certificate;
mod checkpoint;
mod grid;

use std::f64::consts::PI;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::caps::{RhoGeometry, SideTrig};
use crate::config;
use crate::{Error, Result};

pub use audit::{audit_corner_rules, MonotonicityAudit};
pub use certificate::{Certificate, CERTIFICATE_KEYS};
pub use grid::AxisGrid;

use checkpoint::CheckpointState;
use grid::{SlabEngine, SlabSummary};

/// Margin around `2x+y+z = π` inside which both candidate corners are
/// evaluated even under [`CornerRule::Monotone`].
const SIGN_MARGIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// How the maximum vertex angle over a box is located.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CornerRule {
    /// Single corner chosen from the sign of `π - (2x+y+z)` over the box;
    /// both corners only where the sign changes inside the box.
    Monotone,
    /// Always the larger of the two candidate corners.
    TwoCorner,
}

impl CornerRule {
    pub fn name(self) -> &'static str {
        match self {
            CornerRule::Monotone => "monotone",
            CornerRule::TwoCorner => "two-corner",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "monotone" => Some(CornerRule::Monotone),
            "two-corner" => Some(CornerRule::TwoCorner),
            _ => None,
        }
    }
}

/// Axis-aligned box `[a, a+δ] × [b, b+δ] × [c, c+δ]` in the cap-radius cube,
/// possibly shrunk on the last row of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    /// Nominal side length.
    pub delta: f64,
}

impl Cell {
    /// Full cube with lower corner `(a, b, c)`.
    pub fn cube(a: f64, b: f64, c: f64, delta: f64) -> Self {
        Cell {
            lower: [a, b, c],
            upper: [a + delta, b + delta, c + delta],
            delta,
        }
    }

    pub fn contains(&self, p: &[f64; 3]) -> bool {
        (0..3).all(|k| p[k] >= self.lower[k] && p[k] <= self.upper[k])
    }
}

#[inline]
fn corner_sum(corner: &[f64; 3], axis: usize) -> f64 {
    corner[0] + corner[1] + corner[2] + corner[axis]
}

/// Picks the angle bound from the two candidate corners. Invalid angles
/// count as π.
#[inline]
fn pick_angle(rule: CornerRule, s_lo: f64, s_hi: f64, near: f64, far: f64) -> f64 {
    let v = match rule {
        CornerRule::Monotone if s_hi <= PI - SIGN_MARGIN => near,
        CornerRule::Monotone if s_lo >= PI + SIGN_MARGIN => far,
        _ => {
            if near.is_nan() || far.is_nan() {
                f64::NAN
            } else {
                near.max(far)
            }
        }
    };
    if v.is_nan() {
        PI
    } else {
        v
    }
}

#[inline]
fn combine(area: f64, k: [f64; 3], angle: [f64; 3]) -> f64 {
    if !(area > 0.0) {
        return f64::INFINITY;
    }
    (k[0] * angle[0] + k[1] * angle[1] + k[2] * angle[2]) / (2.0 * PI * area)
}

fn corner_angles(p: [f64; 3]) -> [f64; 3] {
    SideTrig::new(p[0], p[1], p[2]).angles()
}

/// Upper bound of the vertex angle at `axis` over the box.
pub fn box_angle_upper(cell: &Cell, axis: Axis, rule: CornerRule) -> f64 {
    let a = axis.index();
    let mut near = cell.upper;
    near[a] = cell.lower[a];
    let near_angle = corner_angles(near)[a];
    let far_angle = corner_angles(cell.upper)[a];
    pick_angle(
        rule,
        corner_sum(&cell.lower, a),
        corner_sum(&cell.upper, a),
        near_angle,
        far_angle,
    )
}

/// Upper bound of `D_rho` over the box; `+inf` when the smallest area is not
/// positive.
pub fn box_density_upper(geom: &RhoGeometry, cell: &Cell, rule: CornerRule) -> f64 {
    let low = corner_angles(cell.lower);
    let area = low[0] + low[1] + low[2] - PI;
    let k = [0, 1, 2].map(|a| geom.k_unchecked(cell.upper[a]));
    let angle = Axis::ALL.map(|axis| box_angle_upper(cell, axis, rule));
    combine(area, k, angle)
}

/// What to certify.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyParams {
    pub rho: f64,
    pub delta: f64,
    pub target: f64,
    pub fp_slack: f64,
}

impl Default for CertifyParams {
    fn default() -> Self {
        CertifyParams {
            rho: config::RHO,
            delta: config::DELTA,
            target: config::TARGET,
            fp_slack: config::FP_SLACK,
        }
    }
}

impl CertifyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::domain(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.target.is_finite() && self.target > 0.0) {
            return Err(Error::domain(format!("target must be positive, got {}", self.target)));
        }
        if !(self.fp_slack.is_finite() && self.fp_slack >= 0.0) {
            return Err(Error::domain(format!(
                "fp_slack must be non-negative, got {}",
                self.fp_slack
            )));
        }
        Ok(())
    }
}

/// How to run a certification.
#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub rule: CornerRule,
    /// Resume from and periodically write to this file.
    pub checkpoint: Option<PathBuf>,
    /// Boxes between checkpoints (and between progress reports).
    pub checkpoint_every: u64,
    /// Stop once at least this many boxes have been processed in total,
    /// leaving the checkpoint to resume from.
    pub halt_after: Option<u64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            rule: CornerRule::Monotone,
            checkpoint: None,
            checkpoint_every: config::CHECKPOINT_EVERY,
            halt_after: None,
        }
    }
}

/// Outcome of a finished certification run.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifyReport {
    pub certificate: Certificate,
    /// Grid indices of the box with the largest bound.
    pub worst_box: [usize; 3],
    pub worst_cell: Cell,
    /// Boxes whose bound was infinite.
    pub unbounded_boxes: u64,
    pub rule: CornerRule,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertifyStatus {
    Finished(CertifyReport),
    /// Halted early; the checkpoint holds the state.
    Suspended { boxes_done: u64, total: u64 },
}

/// Certifies with default options, using the current rayon pool.
pub fn certify(rho: f64, delta: f64, target: f64, fp_slack: f64) -> Result<Certificate> {
    let params = CertifyParams {
        rho,
        delta,
        target,
        fp_slack,
    };
    match certify_with(&params, &CertifyOptions::default(), |_, _| {})? {
        CertifyStatus::Finished(report) => Ok(report.certificate),
        CertifyStatus::Suspended { .. } => unreachable!("no halt requested"),
    }
}

/// Splits the slab range into `parts` contiguous runs of similar box counts.
fn partition(grid: &AxisGrid, slabs: std::ops::Range<usize>, parts: usize) -> Vec<std::ops::Range<usize>> {
    let total: u64 = slabs.clone().map(|i| grid.slab_box_count(i)).sum();
    let parts = parts.max(1).min(slabs.len().max(1));
    let share = total.div_ceil(parts as u64).max(1);
    let mut out = Vec::with_capacity(parts);
    let mut start = slabs.start;
    let mut acc = 0;
    for i in slabs.clone() {
        acc += grid.slab_box_count(i);
        if acc >= share {
            out.push(start..i + 1);
            start = i + 1;
            acc = 0;
        }
    }
    if start < slabs.end {
        out.push(start..slabs.end);
    }
    out
}

/// Runs the certification, reporting `(boxes_done, total)` after every
/// batch.
pub fn certify_with<P>(params: &CertifyParams, options: &CertifyOptions, mut progress: P) -> Result<CertifyStatus>
where
    P: FnMut(u64, u64),
{
    params.validate()?;
    let geom = RhoGeometry::new(params.rho)?;
    let grid = AxisGrid::new(&geom, params.delta)?;
    let total = grid.reduced_box_count();
    let n = grid.boxes_per_axis();

    let mut state = match &options.checkpoint {
        Some(path) if path.exists() => {
            let state = CheckpointState::read(path)?;
            state.check_matches(path, params, options.rule, n)?;
            state
        }
        _ => CheckpointState::fresh(params, options.rule, n),
    };

    let engine = SlabEngine::new(&geom, &grid, options.rule);
    let workers = rayon::current_num_threads();
    let every = options.checkpoint_every.max(1);

    while state.next_slab < n {
        let start = state.next_slab;
        let mut end = start;
        let mut batch_boxes = 0;
        while end < n && batch_boxes < every {
            batch_boxes += grid.slab_box_count(end);
            end += 1;
        }

        let summaries: Vec<SlabSummary> = partition(&grid, start..end, workers)
            .into_par_iter()
            .map(|range| engine.run(range))
            .collect();
        for s in &summaries {
            state.absorb(s);
        }
        state.next_slab = end;

        if let Some(path) = &options.checkpoint {
            state.write(path)?;
        }
        progress(state.boxes_done, total);

        if let Some(limit) = options.halt_after {
            if state.boxes_done >= limit && state.next_slab < n {
                return Ok(CertifyStatus::Suspended {
                    boxes_done: state.boxes_done,
                    total,
                });
            }
        }
    }

    debug_assert_eq!(state.boxes_done, total);
    let certificate = Certificate::new(params, state.boxes_done, f64::from_bits(state.max_bits));
    let worst_box = state.worst;
    Ok(CertifyStatus::Finished(CertifyReport {
        certificate,
        worst_box,
        worst_cell: grid.cell(worst_box),
        unbounded_boxes: state.unbounded,
        rule: options.rule,
    }))
}
