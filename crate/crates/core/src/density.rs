//! Triangle density `D_rho(x, y, z)` and its maximization.
//!
//! For three pairwise tangent caps with auxiliary radii `x`, `y`, `z`, the
//! density is the share of their triangle covered by the actual caps,
//!
//! ```text
//! D = (K(x)∠x + K(y)∠y + K(z)∠z) / (2π (∠x + ∠y + ∠z - π))
//! ```
//!
//! Its maximum over `[alpha_min, alpha_max]^3` bounds the proportion of the
//! measuring sphere that tangent balls can cover, and multiplying by
//! [`RhoGeometry::degree_factor`] turns it into a bound on `k_3`. The search
//! here is a heuristic (multistart simplex); [`crate::certifier`] provides the
//! rigorous counterpart.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::caps::{triangle_angles, RhoGeometry, SideTrig, TriangleAngles};
use crate::config;
use crate::report::format_sig;
use crate::simplex::{self, SimplexOptions};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleDensity {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub angles: TriangleAngles,
    pub density: f64,
}

pub fn density(geom: &RhoGeometry, x: f64, y: f64, z: f64) -> Result<TriangleDensity> {
    let kx = geom.k(x)?;
    let ky = geom.k(y)?;
    let kz = geom.k(z)?;
    let angles = triangle_angles(x, y, z)?;
    let density = (kx * angles.angle_x + ky * angles.angle_y + kz * angles.angle_z)
        / (2.0 * PI * angles.area);
    Ok(TriangleDensity {
        x,
        y,
        z,
        angles,
        density,
    })
}

/// Density for the search: `-inf` outside the cube or on degenerate input.
pub(crate) fn density_or_neg_inf(geom: &RhoGeometry, p: &[f64; 3]) -> f64 {
    if !p.iter().all(|&v| geom.contains(v)) {
        return f64::NEG_INFINITY;
    }
    let [ax, ay, az] = SideTrig::new(p[0], p[1], p[2]).angles();
    let area = ax + ay + az - PI;
    if !(area > 0.0) {
        return f64::NEG_INFINITY;
    }
    let num = geom.k_unchecked(p[0]) * ax + geom.k_unchecked(p[1]) * ay + geom.k_unchecked(p[2]) * az;
    let d = num / (2.0 * PI * area);
    if d.is_nan() {
        f64::NEG_INFINITY
    } else {
        d
    }
}

/// Knobs of the multistart search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Spacing of the start grid over the cap-radius cube.
    pub start_step: f64,
    /// Simplex size and value-spread tolerance of each local search.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            start_step: config::START_STEP,
            tolerance: config::LOCAL_TOLERANCE,
            max_iterations: config::LOCAL_MAX_ITERATIONS,
        }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if !(self.start_step.is_finite() && self.start_step > 0.0) {
            return Err(Error::domain(format!("start step must be positive, got {}", self.start_step)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::domain(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Best density found for one inflation ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepResult {
    pub rho: f64,
    pub max_density: f64,
    /// Maximizer, sorted ascending.
    pub argmax: [f64; 3],
    /// `max_density * 8 rho / (-rho^2 + 4 rho - 3)`.
    pub objective: f64,
    pub starts: usize,
    /// Starts whose initial point could not be evaluated.
    pub failed_starts: usize,
    /// Local searches that hit the iteration cap before converging.
    pub unconverged: usize,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    density: f64,
    point: [f64; 3],
}

impl Candidate {
    fn new(density: f64, mut point: [f64; 3]) -> Self {
        point.sort_by(f64::total_cmp);
        Candidate { density, point }
    }

    /// Higher density wins; ties go to the lexicographically smaller triple.
    fn better_than(&self, other: &Candidate) -> bool {
        match self.density.total_cmp(&other.density) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => {
                let lex = self
                    .point
                    .iter()
                    .zip(other.point.iter())
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| *o != Ordering::Equal)
                    .unwrap_or(Ordering::Equal);
                lex == Ordering::Less
            }
        }
    }
}

/// Nodes of the start grid along one axis: `alpha_min + k * step` inside the
/// interval, followed by `alpha_max` itself.
pub fn start_nodes(geom: &RhoGeometry, step: f64) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..)
        .map(|k| geom.alpha_min + k as f64 * step)
        .take_while(|&v| v < geom.alpha_max - 1e-12)
        .collect();
    nodes.push(geom.alpha_max);
    nodes
}

/// Start points of the symmetry-reduced region `x <= y <= z`.
pub fn start_points(geom: &RhoGeometry, step: f64) -> Vec<[f64; 3]> {
    let nodes = start_nodes(geom, step);
    let mut points = Vec::new();
    for i in 0..nodes.len() {
        for j in i..nodes.len() {
            for k in j..nodes.len() {
                points.push([nodes[i], nodes[j], nodes[k]]);
            }
        }
    }
    points
}

fn local_search(geom: &RhoGeometry, start: [f64; 3], cfg: &SearchConfig) -> (Option<Candidate>, bool) {
    // step inward so the initial simplex stays inside the cube when possible
    let h = 0.5 * cfg.start_step.min(geom.width());
    let mut initial_step = [h; 3];
    for k in 0..3 {
        if start[k] + h > geom.alpha_max {
            initial_step[k] = -h;
        }
    }
    let opts = SimplexOptions {
        tolerance: cfg.tolerance,
        max_iterations: cfg.max_iterations,
        initial_step,
    };
    let out = simplex::minimize(|p| -density_or_neg_inf(geom, p), start, &opts);
    if !out.value.is_finite() {
        return (None, out.converged);
    }
    (Some(Candidate::new(-out.value, out.point)), out.converged)
}

fn reduce(candidates: impl IntoIterator<Item = Candidate>) -> Option<Candidate> {
    candidates.into_iter().fold(None, |best, c| match best {
        Some(b) if !c.better_than(&b) => Some(b),
        _ => Some(c),
    })
}

/// Multistart local search over the given start points.
pub fn max_density_from(
    geom: &RhoGeometry,
    cfg: &SearchConfig,
    starts: &[[f64; 3]],
) -> Result<SweepResult> {
    cfg.validate()?;
    let outcomes: Vec<(Option<Candidate>, bool)> = starts
        .par_iter()
        .map(|&s| local_search(geom, s, cfg))
        .collect();
    let failed_starts = outcomes.iter().filter(|(c, _)| c.is_none()).count();
    let unconverged = outcomes.iter().filter(|(c, ok)| c.is_some() && !ok).count();
    let mut best = reduce(outcomes.iter().filter_map(|(c, _)| *c))
        .ok_or_else(|| Error::domain("no start point of the search could be evaluated"))?;

    // restart from the incumbent until the simplex stops finding improvements
    for _ in 0..8 {
        let (polished, _) = local_search(geom, best.point, cfg);
        match polished {
            Some(p) if p.density > best.density + cfg.tolerance => best = p,
            Some(p) if p.better_than(&best) => {
                best = p;
                break;
            }
            _ => break,
        }
    }

    Ok(SweepResult {
        rho: geom.rho,
        max_density: best.density,
        argmax: best.point,
        objective: best.density * geom.degree_factor(),
        starts: starts.len(),
        failed_starts,
        unconverged,
    })
}

/// Maximum of `D_rho` over the cap-radius cube, searched from every point of
/// the symmetry-reduced start grid.
pub fn max_density(geom: &RhoGeometry, cfg: &SearchConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let starts = start_points(geom, cfg.start_step);
    max_density_from(geom, cfg, &starts)
}

/// `D_rho(α0, α0, α0) * 8 rho / (-rho^2 + 4 rho - 3)`: a lower bound on the
/// objective used to discard inflation ratios cheaply.
pub fn alpha_zero_objective(rho: f64) -> Result<f64> {
    let geom = RhoGeometry::new(rho)?;
    let a = geom.alpha_zero;
    Ok(density(&geom, a, a, a)?.density * geom.degree_factor())
}

/// Whether the pruning predicate excludes `rho` at the given threshold.
pub fn is_pruned(rho: f64, threshold: f64) -> Result<bool> {
    Ok(alpha_zero_objective(rho)? >= threshold)
}

const WINDOW_SCAN_LO: f64 = 1.01;
const WINDOW_SCAN_HI: f64 = 2.99;
const WINDOW_TOLERANCE: f64 = 1e-9;

fn bisect_crossing(mut inside: f64, mut outside: f64, threshold: f64) -> Result<f64> {
    while (outside - inside).abs() > WINDOW_TOLERANCE {
        let mid = 0.5 * (inside + outside);
        if alpha_zero_objective(mid)? < threshold {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Interval of inflation ratios that survive the pruning predicate, with both
/// ends located by bisection.
pub fn pruning_window(threshold: f64) -> Result<(f64, f64)> {
    let n = 1_000;
    let mut best = (f64::INFINITY, WINDOW_SCAN_LO);
    for k in 0..=n {
        let rho = WINDOW_SCAN_LO + (WINDOW_SCAN_HI - WINDOW_SCAN_LO) * k as f64 / n as f64;
        let v = alpha_zero_objective(rho)?;
        if v < best.0 {
            best = (v, rho);
        }
    }
    let (min_value, center) = best;
    if min_value >= threshold {
        return Err(Error::domain(format!(
            "pruning threshold {threshold} excludes every ratio (minimum {min_value})"
        )));
    }
    if alpha_zero_objective(WINDOW_SCAN_LO)? < threshold
        || alpha_zero_objective(WINDOW_SCAN_HI)? < threshold
    {
        return Err(Error::domain(format!(
            "pruning threshold {threshold} does not exclude the ends of the ratio range"
        )));
    }
    Ok((
        bisect_crossing(center, WINDOW_SCAN_LO, threshold)?,
        bisect_crossing(center, WINDOW_SCAN_HI, threshold)?,
    ))
}

/// Inflation ratios `lo + k * step` up to `hi`.
pub fn rho_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && lo <= hi) {
        return Err(Error::domain(format!(
            "empty ratio grid: lo {lo}, hi {hi}, step {step}"
        )));
    }
    if !(lo > 1.0 && hi < 3.0) {
        return Err(Error::domain(format!("ratio grid [{lo}, {hi}] must lie in (1, 3)")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| lo + k as f64 * step).collect())
}

/// Row of a sweep: either evaluated or discarded by the pruning predicate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepEntry {
    Evaluated(SweepResult),
    Pruned { rho: f64, alpha_zero_objective: f64 },
}

impl SweepEntry {
    pub fn rho(&self) -> f64 {
        match self {
            SweepEntry::Evaluated(r) => r.rho,
            SweepEntry::Pruned { rho, .. } => *rho,
        }
    }

    pub fn evaluated(&self) -> Option<&SweepResult> {
        match self {
            SweepEntry::Evaluated(r) => Some(r),
            SweepEntry::Pruned { .. } => None,
        }
    }
}

/// Evaluates the objective at every ratio of the grid.
pub fn sweep_rho(lo: f64, hi: f64, step: f64, cfg: &SearchConfig) -> Result<Vec<SweepResult>> {
    rho_grid(lo, hi, step)?
        .into_iter()
        .map(|rho| max_density(&RhoGeometry::new(rho)?, cfg))
        .collect()
}

/// Like [`sweep_rho`], but ratios whose pruning predicate reaches
/// `threshold` are skipped.
pub fn sweep_rho_pruned(
    lo: f64,
    hi: f64,
    step: f64,
    cfg: &SearchConfig,
    threshold: f64,
) -> Result<Vec<SweepEntry>> {
    rho_grid(lo, hi, step)?
        .into_iter()
        .map(|rho| {
            let lower = alpha_zero_objective(rho)?;
            if lower >= threshold {
                Ok(SweepEntry::Pruned {
                    rho,
                    alpha_zero_objective: lower,
                })
            } else {
                Ok(SweepEntry::Evaluated(max_density(&RhoGeometry::new(rho)?, cfg)?))
            }
        })
        .collect()
}

/// Row with the smallest objective; ties go to the smaller ratio.
pub fn sweep_minimum<'a>(rows: impl IntoIterator<Item = &'a SweepResult>) -> Option<&'a SweepResult> {
    rows.into_iter().fold(None, |best: Option<&SweepResult>, r| match best {
        Some(b) if b.objective <= r.objective => Some(b),
        _ => Some(r),
    })
}

pub const SWEEP_CSV_HEADER: &str = "rho,max_density,x,y,z,objective";

/// CSV row in the `rho,max_density,x,y,z,objective` layout.
pub fn sweep_csv_row(r: &SweepResult) -> String {
    let f = |v: f64| format_sig(v, 12);
    format!(
        "{},{},{},{},{},{}",
        f(r.rho),
        f(r.max_density),
        f(r.argmax[0]),
        f(r.argmax[1]),
        f(r.argmax[2]),
        f(r.objective)
    )
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepResult]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", sweep_csv_row(r))?;
    }
    Ok(())
}
