//! Finite-difference checks of the monotonicity facts behind the corner
//! rules.
//!
//! Sample points follow the three-dimensional additive recurrence (powers of
//! the generalized golden ratio), so they cover the cube evenly and depend
//! only on the seed.

use std::f64::consts::PI;

use crate::caps::{RhoGeometry, SideTrig};

const STEP: f64 = 1e-7;
/// Points this close to `2x+y+z = π` carry no sign information at `STEP`.
const SIGN_BAND: f64 = 1e-4;

/// Violations counted per claim.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MonotonicityAudit {
    pub samples: usize,
    /// Samples with `x + y + z` too close to `π` to form a triangle.
    pub skipped: usize,
    /// Area failed to increase in some variable.
    pub area: usize,
    /// `K` decreased.
    pub k: usize,
    /// A vertex angle failed to increase in an adjacent radius.
    pub angle_adjacent: usize,
    /// A vertex angle moved the wrong way in its own radius.
    pub angle_own: usize,
}

impl MonotonicityAudit {
    pub fn holds(&self) -> bool {
        self.area == 0 && self.k == 0 && self.angle_adjacent == 0 && self.angle_own == 0
    }
}

fn angles(p: [f64; 3]) -> [f64; 3] {
    SideTrig::new(p[0], p[1], p[2]).angles()
}

fn area(a: [f64; 3]) -> f64 {
    a[0] + a[1] + a[2] - PI
}

/// Checks every monotonicity claim at `samples` points of the cube.
pub fn audit_corner_rules(geom: &RhoGeometry, samples: usize, seed: u64) -> MonotonicityAudit {
    // root of x^4 = x + 1
    let g = 1.220_744_084_605_759_5_f64;
    let alpha = [1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)];
    let offset = (seed as f64 * 0.618_033_988_749_894_9).fract();
    let lo = geom.alpha_min;
    let span = geom.width() - STEP;

    let mut audit = MonotonicityAudit {
        samples,
        ..Default::default()
    };
    for n in 0..samples {
        let p = [0, 1, 2].map(|k| lo + span * (offset + (n + 1) as f64 * alpha[k]).fract());
        if p[0] + p[1] + p[2] + STEP >= PI - SIGN_BAND {
            audit.skipped += 1;
            continue;
        }
        let base = angles(p);
        let base_area = area(base);

        for v in 0..3 {
            let mut q = p;
            q[v] += STEP;
            let moved = angles(q);
            if !(area(moved) > base_area) {
                audit.area += 1;
            }
            if geom.k_unchecked(q[v]) < geom.k_unchecked(p[v]) {
                audit.k += 1;
            }
            for axis in 0..3 {
                let delta = moved[axis] - base[axis];
                if axis == v {
                    let s = 2.0 * p[axis] + p[(axis + 1) % 3] + p[(axis + 2) % 3];
                    let wrong = (s < PI - SIGN_BAND && !(delta < 0.0))
                        || (s > PI + SIGN_BAND && !(delta > 0.0));
                    if wrong {
                        audit.angle_own += 1;
                    }
                } else if !(delta > 0.0) {
                    audit.angle_adjacent += 1;
                }
            }
        }
    }
    audit
}
