//! Ball packings, their contact graphs, and coverage audits.
//!
//! Packings are read from a JSON document
//! `{"balls": [{"center": [x, y, z], "radius": r}, ...]}`. Two balls are in
//! contact when the gap between them is within a relative tolerance of the
//! sum of their radii.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::caps::{aux_cap_radius, coverage_fraction, pair_constant, RhoGeometry};
use crate::config::TANGENCY_TOLERANCE;
use crate::density::{max_density, SearchConfig};
use crate::report::format_sig;
use crate::{Error, Result};

/// Above this many balls neighbor search goes through a uniform grid.
pub const ALL_PAIRS_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 3],
    pub radius: f64,
}

impl Ball {
    fn distance(&self, other: &Ball) -> f64 {
        let d: f64 = (0..3).map(|k| (self.center[k] - other.center[k]).powi(2)).sum();
        d.sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Packing {
    balls: Vec<Ball>,
    tolerance: f64,
}

#[derive(Deserialize, Serialize)]
struct PackingDocument {
    balls: Vec<Ball>,
}

/// Calls `f(i, j)` for every pair `i < j` whose centers are close enough to
/// touch or overlap.
fn for_each_close_pair<F: FnMut(usize, usize)>(balls: &[Ball], tolerance: f64, force_grid: bool, mut f: F) {
    if balls.len() <= ALL_PAIRS_LIMIT && !force_grid {
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                f(i, j);
            }
        }
        return;
    }
    let r_max = balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let cell = 2.0 * r_max * (1.0 + tolerance);
    let key = |b: &Ball| b.center.map(|c| (c / cell).floor() as i64);
    let mut cells: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, b) in balls.iter().enumerate() {
        cells.entry(key(b)).or_default().push(i);
    }
    for (i, b) in balls.iter().enumerate() {
        let [cx, cy, cz] = key(b);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(members) = cells.get(&[cx + dx, cy + dy, cz + dz]) {
                        for &j in members {
                            if j > i {
                                f(i, j);
                            }
                        }
                    }
                }
            }
        }
    }
}

impl Packing {
    /// Validates radii, coordinates and pairwise non-overlap.
    pub fn new(balls: Vec<Ball>, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && (0.0..1.0).contains(&tolerance)) {
            return Err(Error::domain(format!("tolerance must lie in [0, 1), got {tolerance}")));
        }
        for (i, b) in balls.iter().enumerate() {
            if !(b.radius.is_finite() && b.radius > 0.0) {
                return Err(Error::domain(format!("ball {i}: radius must be positive, got {}", b.radius)));
            }
            if !b.center.iter().all(|c| c.is_finite()) {
                return Err(Error::domain(format!("ball {i}: center must be finite")));
            }
        }
        let mut overlap = None;
        for_each_close_pair(&balls, tolerance, false, |i, j| {
            let (a, b) = (&balls[i], &balls[j]);
            let reach = a.radius + b.radius;
            let d = a.distance(b);
            if d < reach * (1.0 - tolerance) {
                let found = (i, j, reach - d);
                // report the lexicographically first offending pair
                if overlap.map_or(true, |(oi, oj, _)| (i, j) < (oi, oj)) {
                    overlap = Some(found);
                }
            }
        });
        if let Some((i, j, depth)) = overlap {
            return Err(Error::Overlap { i, j, depth });
        }
        Ok(Packing { balls, tolerance })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PackingDocument {
            balls: self.balls.clone(),
        })
        .expect("packing serializes")
    }
}

/// Parses a packing document and validates it at the default tolerance.
pub fn load_packing(document: &str) -> Result<Packing> {
    load_packing_with(document, TANGENCY_TOLERANCE)
}

pub fn load_packing_with(document: &str, tolerance: f64) -> Result<Packing> {
    let doc: PackingDocument = serde_json::from_str(document).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    Packing::new(doc.balls, tolerance)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContactGraph {
    pub vertex_count: usize,
    /// Pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub average_degree: f64,
}

impl ContactGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }
}

fn build_graph(p: &Packing, force_grid: bool) -> ContactGraph {
    let balls = p.balls();
    let mut edges = Vec::new();
    for_each_close_pair(balls, p.tolerance, force_grid, |i, j| {
        let reach = balls[i].radius + balls[j].radius;
        if (balls[i].distance(&balls[j]) - reach).abs() <= p.tolerance * reach {
            edges.push((i, j));
        }
    });
    edges.sort_unstable();
    let average_degree = if balls.is_empty() {
        0.0
    } else {
        2.0 * edges.len() as f64 / balls.len() as f64
    };
    ContactGraph {
        vertex_count: balls.len(),
        edges,
        average_degree,
    }
}

/// Tangency graph of the packing.
pub fn contact_graph(p: &Packing) -> ContactGraph {
    build_graph(p, false)
}

/// [`contact_graph`] through the spatial grid regardless of size.
pub fn contact_graph_grid(p: &Packing) -> ContactGraph {
    build_graph(p, true)
}

/// Unit balls at the face-centered cubic sites within `shells` contact steps
/// of the origin (13, 55, 147, ... balls), nearest-neighbor distance 2.
pub fn fcc_fragment(shells: u32) -> Result<Packing> {
    if shells < 1 {
        return Err(Error::domain("fcc fragment needs at least one shell"));
    }
    let n = shells as i64;
    let scale = std::f64::consts::SQRT_2;
    let mut balls = Vec::new();
    for i in -2 * n..=2 * n {
        for j in -2 * n..=2 * n {
            for k in -2 * n..=2 * n {
                if (i + j + k).rem_euclid(2) != 0 {
                    continue;
                }
                let (a, b, c) = (i.abs(), j.abs(), k.abs());
                // contact steps from the origin in the lattice generated by
                // (±1, ±1, 0) and permutations
                let steps = a.max(b).max(c).max((a + b + c) / 2);
                if steps <= n {
                    balls.push(Ball {
                        center: [i as f64 * scale, j as f64 * scale, k as f64 * scale],
                        radius: 1.0,
                    });
                }
            }
        }
    }
    Packing::new(balls, TANGENCY_TOLERANCE)
}

/// Coverage of one ball's measuring sphere by its tangent neighbors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallCoverage {
    pub index: usize,
    pub degree: usize,
    /// `Σ a(B, B_i)` over tangent neighbors.
    pub coverage_sum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageReport {
    pub rho: f64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub average_degree: f64,
    pub per_ball: Vec<BallCoverage>,
    /// `Σ_edges a(X,Y) + a(Y,X)`.
    pub edge_sum: f64,
    /// `(-rho^2 + 4 rho - 3) / (4 rho)`, the least contribution of an edge.
    pub pair_minimum: f64,
    /// Density ceiling the per-ball sums are compared against.
    pub density_ceiling: f64,
    /// Edges whose two caps are both non-empty yet contribute other than the
    /// pair constant.
    pub pair_identity_violations: Vec<(usize, usize)>,
    /// Balls whose coverage exceeds the ceiling.
    pub ceiling_violations: Vec<usize>,
    /// Neighbors too small to cut a cap (they cover nothing).
    pub capless_neighbors: usize,
}

impl CoverageReport {
    pub fn edge_sum_holds(&self) -> bool {
        self.edge_sum >= self.pair_minimum * self.edge_count as f64 - 1e-12 * self.edge_count as f64
    }

    pub fn holds(&self) -> bool {
        self.edge_sum_holds() && self.pair_identity_violations.is_empty() && self.ceiling_violations.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "ball_index,degree,coverage_sum")?;
        for b in &self.per_ball {
            writeln!(out, "{},{},{}", b.index, b.degree, format_sig(b.coverage_sum, 12))?;
        }
        Ok(())
    }
}

/// Slack allowed on the per-ball comparison with the density ceiling.
pub const CEILING_SLACK: f64 = 1e-6;

/// Audits the coverage inequalities against an explicit density ceiling.
pub fn coverage_audit_with(p: &Packing, rho: f64, density_ceiling: f64) -> Result<CoverageReport> {
    RhoGeometry::new(rho)?;
    let graph = contact_graph(p);
    let balls = p.balls();
    let mut sums = vec![0.0; balls.len()];
    let mut pair_identity_violations = Vec::new();
    let mut capless_neighbors = 0;
    let mut edge_sum = 0.0;
    let constant = pair_constant(rho);
    for &(i, j) in &graph.edges {
        let (ri, rj) = (balls[i].radius, balls[j].radius);
        let a_ij = coverage_fraction(rho, ri, rj)?;
        let a_ji = coverage_fraction(rho, rj, ri)?;
        sums[i] += a_ij;
        sums[j] += a_ji;
        edge_sum += a_ij + a_ji;
        if a_ij > 0.0 && a_ji > 0.0 && ((a_ij + a_ji) - constant).abs() > 1e-12 {
            pair_identity_violations.push((i, j));
        }
        for (r1, r2) in [(ri, rj), (rj, ri)] {
            if aux_cap_radius(rho, r1, r2).is_err() {
                capless_neighbors += 1;
            }
        }
    }
    let degrees = graph.degrees();
    let per_ball: Vec<BallCoverage> = sums
        .iter()
        .enumerate()
        .map(|(index, &coverage_sum)| BallCoverage {
            index,
            degree: degrees[index],
            coverage_sum,
        })
        .collect();
    let ceiling_violations = per_ball
        .iter()
        .filter(|b| b.coverage_sum > density_ceiling + CEILING_SLACK)
        .map(|b| b.index)
        .collect();
    Ok(CoverageReport {
        rho,
        vertex_count: graph.vertex_count,
        edge_count: graph.edges.len(),
        average_degree: graph.average_degree,
        per_ball,
        edge_sum,
        pair_minimum: constant,
        density_ceiling,
        pair_identity_violations,
        ceiling_violations,
        capless_neighbors,
    })
}

/// Audits the coverage inequalities, taking the ceiling from the density
/// search at `rho`.
pub fn coverage_audit(p: &Packing, rho: f64) -> Result<CoverageReport> {
    let geom = RhoGeometry::new(rho)?;
    let ceiling = max_density(&geom, &SearchConfig::default())?.max_density;
    coverage_audit_with(p, rho, ceiling)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_balls(distance: f64) -> String {
        format!(
            r#"{{"balls": [{{"center": [0, 0, 0], "radius": 1}}, {{"center": [{distance}, 0, 0], "radius": 1.0}}]}}"#
        )
    }

    #[test]
    fn loads_tangent_pair() {
        let p = load_packing(&two_balls(2.0)).unwrap();
        assert_eq!(p.len(), 2);
        let g = contact_graph(&p);
        assert_eq!(g.edges, vec![(0, 1)]);
        assert_eq!(g.average_degree, 1.0);
    }

    #[test]
    fn rejects_overlap() {
        match load_packing(&two_balls(1.9)) {
            Err(Error::Overlap { i, j, depth }) => {
                assert_eq!((i, j), (0, 1));
                assert!((depth - 0.1).abs() < 1e-12);
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn reports_parse_position() {
        let err = load_packing("{\"balls\": [\n  {\"center\": [0, 0], \"radius\": 1}\n]}").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.starts_with("line 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            load_packing(r#"{"balls": [{"center": [0, 0, 0], "radius": -1}]}"#),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn single_ball_has_no_edges() {
        let p = load_packing(r#"{"balls": [{"center": [1, 2, 3], "radius": 0.5}]}"#).unwrap();
        let g = contact_graph(&p);
        assert!(g.edges.is_empty());
        assert_eq!(g.average_degree, 0.0);
        let empty = load_packing(r#"{"balls": []}"#).unwrap();
        assert_eq!(contact_graph(&empty).average_degree, 0.0);
    }

    #[test]
    fn separated_balls_are_not_in_contact() {
        let p = load_packing(&two_balls(2.1)).unwrap();
        assert!(contact_graph(&p).edges.is_empty());
    }

    #[test]
    fn fcc_counts() {
        assert_eq!(fcc_fragment(1).unwrap().len(), 13);
        assert_eq!(fcc_fragment(2).unwrap().len(), 55);
        assert_eq!(fcc_fragment(3).unwrap().len(), 147);
        assert!(fcc_fragment(0).is_err());
    }

    #[test]
    fn fcc_first_shell() {
        let p = fcc_fragment(1).unwrap();
        let g = contact_graph(&p);
        let center = p.balls().iter().position(|b| b.center == [0.0; 3]).unwrap();
        assert_eq!(g.degrees()[center], 12);
        assert!(g.average_degree < 12.0);
    }

    /// Brute-force neighbor count over the lattice itself.
    #[test]
    fn fcc_interior_degree_matches_lattice() {
        let p = fcc_fragment(2).unwrap();
        let g = contact_graph(&p);
        let deg = g.degrees();
        let mut lattice_neighbors = 0;
        for i in -2i64..=2 {
            for j in -2i64..=2 {
                for k in -2i64..=2 {
                    if (i + j + k) % 2 == 0 && i * i + j * j + k * k == 2 {
                        lattice_neighbors += 1;
                    }
                }
            }
        }
        assert_eq!(lattice_neighbors, 12);
        for (idx, b) in p.balls().iter().enumerate() {
            // every ball of the first shell is interior to the two-shell fragment
            let r = (b.center.iter().map(|c| c * c).sum::<f64>()).sqrt();
            if r < 2.0 + 1e-9 {
                assert_eq!(deg[idx], lattice_neighbors);
            }
        }
    }

    #[test]
    fn fcc_average_degree_grows() {
        let degs: Vec<f64> = (1..=4)
            .map(|n| contact_graph(&fcc_fragment(n).unwrap()).average_degree)
            .collect();
        assert!(degs.windows(2).all(|w| w[1] > w[0]), "{degs:?}");
        assert!(degs.iter().all(|&d| d < 12.0));
    }

    #[test]
    fn grid_search_matches_all_pairs() {
        let p = fcc_fragment(4).unwrap();
        assert_eq!(contact_graph(&p), contact_graph_grid(&p));
        // mixed radii
        let balls = vec![
            Ball { center: [0.0, 0.0, 0.0], radius: 1.0 },
            Ball { center: [3.0, 0.0, 0.0], radius: 2.0 },
            Ball { center: [0.0, 1.5, 0.0], radius: 0.5 },
            Ball { center: [10.0, 0.0, 0.0], radius: 0.1 },
        ];
        let p = Packing::new(balls, 1e-9).unwrap();
        let g = contact_graph(&p);
        assert_eq!(g.edges, vec![(0, 1), (0, 2)]);
        assert_eq!(g, contact_graph_grid(&p));
    }

    #[test]
    fn reordering_preserves_graph() {
        let p = fcc_fragment(2).unwrap();
        let mut balls = p.balls().to_vec();
        balls.reverse();
        let q = Packing::new(balls, p.tolerance()).unwrap();
        let (g, h) = (contact_graph(&p), contact_graph(&q));
        assert_eq!(g.edges.len(), h.edges.len());
        assert_eq!(g.average_degree, h.average_degree);
        let n = p.len();
        let mut mapped: Vec<(usize, usize)> = h
            .edges
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (n - 1 - i, n - 1 - j);
                (a.min(b), a.max(b))
            })
            .collect();
        mapped.sort_unstable();
        assert_eq!(mapped, g.edges);
    }

    #[test]
    fn json_round_trip() {
        let p = fcc_fragment(1).unwrap();
        let q = load_packing(&p.to_json()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn two_ball_audit() {
        let p = load_packing(&two_balls(2.0)).unwrap();
        let r = coverage_audit_with(&p, 2.0, 1.0).unwrap();
        assert!((r.edge_sum - 0.125).abs() < 1e-15);
        assert!(r.holds());
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "ball_index,degree,coverage_sum\n0,1,0.0625000000000\n1,1,0.0625000000000\n"
        );
    }

    #[test]
    fn mixed_radii_audit() {
        let balls = vec![
            Ball { center: [0.0, 0.0, 0.0], radius: 1.0 },
            Ball { center: [3.0, 0.0, 0.0], radius: 2.0 },
            Ball { center: [0.0, 1.2, 0.0], radius: 0.2 },
        ];
        let p = Packing::new(balls, 1e-9).unwrap();
        let r = coverage_audit_with(&p, 1.755, 0.94).unwrap();
        assert_eq!(r.edge_count, 2);
        // the 0.2 ball is too small to cut a cap on the unit ball's sphere
        assert!(r.capless_neighbors >= 1);
        assert!(r.holds(), "{r:?}");
        assert!(coverage_audit_with(&p, 3.2, 1.0).is_err());
    }
}
