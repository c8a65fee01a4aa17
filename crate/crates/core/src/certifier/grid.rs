//! Uniform grid over the cap-radius interval and the slab sweep.
//!
//! Every corner the box bounds need is a grid point, so the sweep computes
//! the triangle angles once per grid point and keeps two planes of them
//! (constant x index `i` and `i + 1`). The arithmetic matches
//! [`super::box_density_upper`] operation for operation, so both give
//! bit-identical bounds.

use std::f64::consts::PI;
use std::ops::Range;

use super::{combine, corner_sum, pick_angle, Cell, CornerRule};
use crate::caps::{RhoGeometry, SideTrig};
use crate::{Error, Result};

/// Nodes `alpha_min + i * delta`, closed by `alpha_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisGrid {
    nodes: Vec<f64>,
    delta: f64,
}

impl AxisGrid {
    pub fn new(geom: &RhoGeometry, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::domain(format!("delta must be positive, got {delta}")));
        }
        let ratio = geom.width() / delta;
        let rounded = ratio.round();
        let n = if (ratio - rounded).abs() < 1e-9 { rounded } else { ratio.ceil() };
        if n > 1e6 {
            return Err(Error::domain(format!("delta {delta} gives {n} boxes per axis")));
        }
        let n = (n as usize).max(1);
        let mut nodes: Vec<f64> = (0..n).map(|i| geom.alpha_min + i as f64 * delta).collect();
        nodes.push(geom.alpha_max);
        Ok(AxisGrid { nodes, delta })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn boxes_per_axis(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Boxes with indices `i <= j <= k`.
    pub fn reduced_box_count(&self) -> u64 {
        let n = self.boxes_per_axis() as u64;
        n * (n + 1) * (n + 2) / 6
    }

    /// Boxes of the reduced region with first index `i`.
    pub fn slab_box_count(&self, i: usize) -> u64 {
        let m = (self.boxes_per_axis() - i) as u64;
        m * (m + 1) / 2
    }

    pub fn cell(&self, idx: [usize; 3]) -> Cell {
        Cell {
            lower: idx.map(|i| self.nodes[i]),
            upper: idx.map(|i| self.nodes[i + 1]),
            delta: self.delta,
        }
    }
}

/// Reduction over a run of slabs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct SlabSummary {
    pub boxes: u64,
    pub max: f64,
    /// First box (in lexicographic order) attaining `max`.
    pub worst: [usize; 3],
    pub unbounded: u64,
}

/// Angles at the grid points `(i, j, k)` for one fixed `i`, stored for
/// `j0 <= j <= k <= n`.
struct Plane {
    j0: usize,
    last: usize,
    offsets: Vec<usize>,
    data: Vec<[f64; 3]>,
}

impl Plane {
    fn empty(last: usize) -> Self {
        Plane {
            j0: 0,
            last,
            offsets: vec![0; last + 2],
            data: Vec::new(),
        }
    }

    #[inline]
    fn stored(&self, j: usize, k: usize) -> [f64; 3] {
        self.data[self.offsets[j - self.j0] + (k - j)]
    }

    /// Angles at `(i, j, k)`; the mirrored point supplies `j > k`.
    #[inline]
    fn get(&self, j: usize, k: usize) -> [f64; 3] {
        if j <= k {
            self.stored(j, k)
        } else {
            let [x, y, z] = self.stored(k, j);
            [x, z, y]
        }
    }
}

pub(crate) struct SlabEngine<'a> {
    nodes: &'a [f64],
    rule: CornerRule,
    /// `cos` and `sin` of `nodes[j] + nodes[k]`, row-major.
    cos_sum: Vec<f64>,
    sin_sum: Vec<f64>,
    /// `K` at every node.
    k_at: Vec<f64>,
}

impl<'a> SlabEngine<'a> {
    pub fn new(geom: &RhoGeometry, grid: &'a AxisGrid, rule: CornerRule) -> Self {
        let nodes = grid.nodes();
        let m = nodes.len();
        let mut cos_sum = vec![0.0; m * m];
        let mut sin_sum = vec![0.0; m * m];
        for j in 0..m {
            for k in 0..m {
                let (s, c) = (nodes[j] + nodes[k]).sin_cos();
                cos_sum[j * m + k] = c;
                sin_sum[j * m + k] = s;
            }
        }
        let k_at = nodes.iter().map(|&a| geom.k_unchecked(a)).collect();
        SlabEngine {
            nodes,
            rule,
            cos_sum,
            sin_sum,
            k_at,
        }
    }

    #[inline]
    fn trig(&self, i: usize, j: usize, k: usize) -> SideTrig {
        let m = self.nodes.len();
        SideTrig {
            cos_xy: self.cos_sum[i * m + j],
            sin_xy: self.sin_sum[i * m + j],
            cos_xz: self.cos_sum[i * m + k],
            sin_xz: self.sin_sum[i * m + k],
            cos_yz: self.cos_sum[j * m + k],
            sin_yz: self.sin_sum[j * m + k],
        }
    }

    /// Fills `plane` with the angles at x index `i`, for `j >= i - 1`.
    fn build(&self, i: usize, plane: &mut Plane) {
        let last = plane.last;
        plane.j0 = i.saturating_sub(1);
        plane.data.clear();
        let mut offset = 0;
        for j in plane.j0..=last {
            plane.offsets[j - plane.j0] = offset;
            for k in j..=last {
                plane.data.push(self.trig(i, j, k).angles());
            }
            offset += last - j + 1;
        }
    }

    pub fn run(&self, slabs: Range<usize>) -> SlabSummary {
        let n = self.nodes.len() - 1;
        let mut summary = SlabSummary {
            boxes: 0,
            max: f64::NEG_INFINITY,
            worst: [0; 3],
            unbounded: 0,
        };
        if slabs.is_empty() {
            return summary;
        }
        let nodes = self.nodes;
        let mut lo = Plane::empty(n);
        let mut hi = Plane::empty(n);
        self.build(slabs.start, &mut hi);

        for i in slabs {
            std::mem::swap(&mut lo, &mut hi);
            self.build(i + 1, &mut hi);
            let kx = self.k_at[i + 1];
            for j in i..n {
                let ky = self.k_at[j + 1];
                for k in j..n {
                    let lower = [nodes[i], nodes[j], nodes[k]];
                    let upper = [nodes[i + 1], nodes[j + 1], nodes[k + 1]];

                    let low = lo.get(j, k);
                    let area = low[0] + low[1] + low[2] - PI;

                    let far = hi.get(j + 1, k + 1);
                    let near_x = lo.get(j + 1, k + 1)[0];
                    let near_y = hi.get(j, k + 1)[1];
                    let near_z = hi.get(j + 1, k)[2];

                    let angle = [
                        pick_angle(self.rule, corner_sum(&lower, 0), corner_sum(&upper, 0), near_x, far[0]),
                        pick_angle(self.rule, corner_sum(&lower, 1), corner_sum(&upper, 1), near_y, far[1]),
                        pick_angle(self.rule, corner_sum(&lower, 2), corner_sum(&upper, 2), near_z, far[2]),
                    ];
                    let bound = combine(area, [kx, ky, self.k_at[k + 1]], angle);

                    summary.boxes += 1;
                    if bound == f64::INFINITY {
                        summary.unbounded += 1;
                    }
                    if bound > summary.max {
                        summary.max = bound;
                        summary.worst = [i, j, k];
                    }
                }
            }
        }
        summary
    }
}

#[cfg(test)]
mod tests {
    use super::super::box_density_upper;
    use super::*;

    #[test]
    fn grid_tiles_the_interval() {
        let g = RhoGeometry::new(1.755).unwrap();
        let grid = AxisGrid::new(&g, 0.0005).unwrap();
        let n = grid.boxes_per_axis();
        assert_eq!(n, 1655);
        assert_eq!(grid.reduced_box_count(), 1655 * 1656 * 1657 / 6);
        assert_eq!(grid.nodes()[0], g.alpha_min);
        assert_eq!(grid.nodes()[n], g.alpha_max);
        let last = grid.nodes()[n] - grid.nodes()[n - 1];
        assert!(last > 0.0 && last <= 0.0005);
        let total: u64 = (0..n).map(|i| grid.slab_box_count(i)).sum();
        assert_eq!(total, grid.reduced_box_count());
    }

    #[test]
    fn exact_multiple_has_no_sliver() {
        let g = RhoGeometry::new(1.755).unwrap();
        let grid = AxisGrid::new(&g, g.width() / 10.0).unwrap();
        assert_eq!(grid.boxes_per_axis(), 10);
    }

    /// The sweep must reproduce the per-box bound bit for bit.
    #[test]
    fn engine_matches_direct_bounds() {
        let g = RhoGeometry::new(1.755).unwrap();
        let grid = AxisGrid::new(&g, 0.03).unwrap();
        let n = grid.boxes_per_axis();
        for rule in [CornerRule::Monotone, CornerRule::TwoCorner] {
            let engine = SlabEngine::new(&g, &grid, rule);
            let mut max = f64::NEG_INFINITY;
            let mut worst = [0; 3];
            let mut count = 0;
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let b = box_density_upper(&g, &grid.cell([i, j, k]), rule);
                        count += 1;
                        if b > max {
                            max = b;
                            worst = [i, j, k];
                        }
                    }
                }
            }
            let whole = engine.run(0..n);
            assert_eq!(whole.boxes, count);
            assert_eq!(whole.max.to_bits(), max.to_bits());
            assert_eq!(whole.worst, worst);

            // split runs give the same reduction
            let a = engine.run(0..5);
            let b = engine.run(5..n);
            assert_eq!(a.boxes + b.boxes, count);
            assert_eq!(a.max.max(b.max).to_bits(), max.to_bits());
        }
    }
}
