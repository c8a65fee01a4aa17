//! Spherical cap geometry on the measuring sphere `S_rho(B)`.
//!
//! A ball `B` of radius `r` carries a concentric sphere of radius `rho * r`.
//! A ball tangent to `B` cuts a cap out of that sphere; everything here is a
//! closed-form function of the inflation ratio and the two radii. Angles are
//! radians throughout.

use std::f64::consts::PI;

use crate::config::ACOS_GUARD;
use crate::{Error, Result};

/// `arccos` that tolerates round-off just outside `[-1, 1]`.
///
/// Returns NaN when the argument lies further out than [`ACOS_GUARD`].
#[inline]
pub(crate) fn guarded_acos(v: f64) -> f64 {
    if v > 1.0 {
        if v <= 1.0 + ACOS_GUARD {
            0.0
        } else {
            f64::NAN
        }
    } else if v < -1.0 {
        if v >= -1.0 - ACOS_GUARD {
            PI
        } else {
            f64::NAN
        }
    } else {
        v.acos()
    }
}

fn check_ratio(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 1.0) {
        return Err(Error::domain(format!("inflation ratio must exceed 1, got {rho}")));
    }
    Ok(())
}

fn check_open_ratio(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 1.0 && rho < 3.0) {
        return Err(Error::domain(format!(
            "inflation ratio must lie in (1, 3), got {rho}"
        )));
    }
    Ok(())
}

fn check_radii(r1: f64, r2: f64) -> Result<()> {
    if !(r1.is_finite() && r1 > 0.0 && r2.is_finite() && r2 > 0.0) {
        return Err(Error::domain(format!(
            "radii must be positive and finite, got {r1} and {r2}"
        )));
    }
    Ok(())
}

/// Constant value of `a(B1,B2) + a(B2,B1)` when both caps are non-empty:
/// `(-rho^2 + 4 rho - 3) / (4 rho)`.
pub fn pair_constant(rho: f64) -> f64 {
    (-rho * rho + 4.0 * rho - 3.0) / (4.0 * rho)
}

/// Cosine of the angular radius of the cap `S_rho(B1) ∩ B2` for tangent balls
/// of radii `r1` and `r2`.
///
/// Clamped to 1 from above: a value of 1 means the intersection is empty (or
/// a single point).
pub fn cap_radius_cos(rho: f64, r1: f64, r2: f64) -> Result<f64> {
    check_ratio(rho)?;
    check_radii(r1, r2)?;
    let c = ((rho * rho + 1.0) * r1 + 2.0 * r2) / (2.0 * rho * (r1 + r2));
    Ok(c.min(1.0))
}

/// Height of the cap `S_rho(B1) ∩ B2`; zero when the intersection is empty.
pub fn cap_height(rho: f64, r1: f64, r2: f64) -> Result<f64> {
    let c = cap_radius_cos(rho, r1, r2)?;
    Ok(rho * r1 * (1.0 - c))
}

/// Fraction `a(B1, B2)` of the area of `S_rho(B1)` covered by the tangent
/// ball `B2`.
pub fn coverage_fraction(rho: f64, r1: f64, r2: f64) -> Result<f64> {
    let c = cap_radius_cos(rho, r1, r2)?;
    Ok((1.0 - c) / 2.0)
}

/// `a(B1,B2) + a(B2,B1)`.
pub fn pair_sum(rho: f64, r1: f64, r2: f64) -> Result<f64> {
    check_open_ratio(rho)?;
    Ok(coverage_fraction(rho, r1, r2)? + coverage_fraction(rho, r2, r1)?)
}

/// Whether both caps `S_rho(B1) ∩ B2` and `S_rho(B2) ∩ B1` are non-empty.
pub fn both_caps_nonempty(rho: f64, r1: f64, r2: f64) -> Result<bool> {
    Ok(cap_radius_cos(rho, r1, r2)? < 1.0 && cap_radius_cos(rho, r2, r1)? < 1.0)
}

/// Angular radius of the auxiliary cap `C_rho(B1, B2)`.
///
/// When the common tangent planes of the two balls touch `B2` inside
/// `S_rho(B1)` (that is `r2 >= (rho^2 - 1) r1 / 4`) the auxiliary cap is the
/// actual cap. Otherwise it is the cap cut by the common tangent cone, which
/// is never smaller than `alpha_min`.
pub fn aux_cap_radius(rho: f64, r1: f64, r2: f64) -> Result<f64> {
    let geom = RhoGeometry::new(rho)?;
    check_radii(r1, r2)?;
    let threshold = (rho * rho - 1.0) * r1 / 4.0;
    let alpha = if r2 >= threshold {
        guarded_acos(cap_radius_cos(rho, r1, r2)?)
    } else {
        guarded_acos((r1 - r2) / (r1 + r2)) - geom.alpha_max
    };
    if !(alpha >= geom.alpha_min - ACOS_GUARD) {
        return Err(Error::domain(format!(
            "ball of radius {r2} is too small to cut a cap on S_rho of a ball of radius {r1} \
             (auxiliary radius {alpha} < alpha_min {})",
            geom.alpha_min
        )));
    }
    Ok(alpha.clamp(geom.alpha_min, geom.alpha_max))
}

/// Angles derived from one inflation ratio `rho` in `(1, 3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoGeometry {
    pub rho: f64,
    /// Smallest auxiliary cap radius.
    pub alpha_min: f64,
    /// Auxiliary radius at which the actual and auxiliary caps start to
    /// coincide.
    pub alpha_zero: f64,
    /// Largest cap radius, reached as the tangent ball grows without bound.
    pub alpha_max: f64,
}

impl RhoGeometry {
    pub fn new(rho: f64) -> Result<Self> {
        check_open_ratio(rho)?;
        let alpha_max = (1.0 / rho).acos();
        let alpha_min = ((3.0 - rho) / (1.0 + rho)).acos() - alpha_max;
        let alpha_zero = ((3.0 * rho * rho + 1.0) / (rho * (rho * rho + 3.0))).acos();
        Ok(RhoGeometry {
            rho,
            alpha_min,
            alpha_zero,
            alpha_max,
        })
    }

    /// `8 rho / (-rho^2 + 4 rho - 3)`: turns a density bound into a bound on
    /// the average degree.
    pub fn degree_factor(&self) -> f64 {
        degree_factor(self.rho)
    }

    /// Width of the admissible cap-radius interval.
    pub fn width(&self) -> f64 {
        self.alpha_max - self.alpha_min
    }

    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.alpha_min && alpha <= self.alpha_max
    }

    /// Area `K(alpha)` of the actual cap whose auxiliary cap has radius
    /// `alpha`, on the unit sphere.
    pub fn k(&self, alpha: f64) -> Result<f64> {
        if !(alpha >= self.alpha_min - ACOS_GUARD && alpha <= self.alpha_max + ACOS_GUARD) {
            return Err(Error::domain(format!(
                "cap radius {alpha} outside [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        Ok(self.k_unchecked(alpha))
    }

    #[inline]
    pub(crate) fn k_unchecked(&self, alpha: f64) -> f64 {
        if alpha >= self.alpha_zero {
            self.k_upper_branch(alpha)
        } else {
            self.k_lower_branch(alpha)
        }
    }

    /// `K` on `[alpha_zero, alpha_max]`, where the actual cap is the
    /// auxiliary one.
    #[inline]
    pub fn k_upper_branch(&self, alpha: f64) -> f64 {
        2.0 * PI * (1.0 - alpha.cos())
    }

    /// `K` on `[alpha_min, alpha_zero]`.
    #[inline]
    pub fn k_lower_branch(&self, alpha: f64) -> f64 {
        let rho = self.rho;
        let tilt = alpha.cos() / rho - (1.0 - 1.0 / (rho * rho)).sqrt() * alpha.sin() + 1.0;
        2.0 * PI * (1.0 - ((rho * rho - 1.0) * tilt + 4.0) / (4.0 * rho))
    }
}

/// `8 rho / (-rho^2 + 4 rho - 3)`.
pub fn degree_factor(rho: f64) -> f64 {
    8.0 * rho / (-rho * rho + 4.0 * rho - 3.0)
}

/// Spherical triangle spanned by the centers of three pairwise tangent caps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleAngles {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Angle at the center of the cap of radius `x`.
    pub angle_x: f64,
    pub angle_y: f64,
    pub angle_z: f64,
    /// Angular excess.
    pub area: f64,
}

/// Cosines and sines of the three side lengths `x+y`, `x+z`, `y+z`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SideTrig {
    pub cos_xy: f64,
    pub sin_xy: f64,
    pub cos_xz: f64,
    pub sin_xz: f64,
    pub cos_yz: f64,
    pub sin_yz: f64,
}

impl SideTrig {
    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        let (sin_xy, cos_xy) = (x + y).sin_cos();
        let (sin_xz, cos_xz) = (x + z).sin_cos();
        let (sin_yz, cos_yz) = (y + z).sin_cos();
        SideTrig {
            cos_xy,
            sin_xy,
            cos_xz,
            sin_xz,
            cos_yz,
            sin_yz,
        }
    }

    /// Vertex angles by the spherical law of cosines. Components are NaN when
    /// an `arccos` argument leaves `[-1, 1]` by more than the guard.
    #[inline]
    pub fn angles(&self) -> [f64; 3] {
        let ax = guarded_acos(
            (self.cos_yz - self.cos_xz * self.cos_xy) / (self.sin_xz * self.sin_xy),
        );
        let ay = guarded_acos(
            (self.cos_xz - self.cos_xy * self.cos_yz) / (self.sin_xy * self.sin_yz),
        );
        let az = guarded_acos(
            (self.cos_xy - self.cos_xz * self.cos_yz) / (self.sin_xz * self.sin_yz),
        );
        [ax, ay, az]
    }
}

/// Angles and area of the triangle with sides `y+z`, `x+z`, `x+y` opposite
/// the vertices carrying the caps `x`, `y`, `z`.
pub fn triangle_angles(x: f64, y: f64, z: f64) -> Result<TriangleAngles> {
    let sides_ok = [x, y, z].iter().all(|v| v.is_finite() && *v > 0.0)
        && x + y < PI
        && x + z < PI
        && y + z < PI;
    if !sides_ok {
        return Err(Error::domain(format!(
            "cap radii ({x}, {y}, {z}) must be positive with pairwise sums below pi"
        )));
    }
    let [angle_x, angle_y, angle_z] = SideTrig::new(x, y, z).angles();
    let area = angle_x + angle_y + angle_z - PI;
    if !(area > 0.0) {
        return Err(Error::Degenerate(format!(
            "caps ({x}, {y}, {z}) give angles ({angle_x}, {angle_y}, {angle_z})"
        )));
    }
    Ok(TriangleAngles {
        x,
        y,
        z,
        angle_x,
        angle_y,
        angle_z,
        area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cap_radius_examples() {
        assert!(close(cap_radius_cos(SQRT3, 1.0, 1.0).unwrap(), SQRT3 / 2.0, 1e-15));
        assert_eq!(cap_radius_cos(2.0, 1.0, 0.5).unwrap(), 1.0);
        assert!(close(cap_radius_cos(2.0, 1.0, 3.0).unwrap(), 11.0 / 16.0, 1e-15));
        // far outside the intersection: clamped
        assert_eq!(cap_radius_cos(2.0, 1.0, 0.1).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(cap_radius_cos(1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(cap_radius_cos(2.0, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(cap_radius_cos(2.0, 1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(cap_height(f64::NAN, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(pair_sum(3.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(RhoGeometry::new(0.5).is_err());
        assert!(RhoGeometry::new(3.0).is_err());
    }

    #[test]
    fn cap_height_examples() {
        assert!(close(cap_height(SQRT3, 1.0, 1.0).unwrap(), SQRT3 - 1.5, 1e-15));
        assert_eq!(cap_height(2.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(close(cap_height(2.0, 1.0, 3.0).unwrap(), 5.0 / 8.0, 1e-15));
    }

    #[test]
    fn coverage_examples() {
        assert!(close(
            coverage_fraction(SQRT3, 1.0, 1.0).unwrap(),
            (1.0 - SQRT3 / 2.0) / 2.0,
            1e-16
        ));
        // Archimedes: (6 - 3 sqrt 3) pi over 12 pi
        assert!(close(
            coverage_fraction(SQRT3, 1.0, 1.0).unwrap(),
            (6.0 - 3.0 * SQRT3) / 12.0,
            1e-15
        ));
        assert_eq!(coverage_fraction(2.0, 1.0, 0.5).unwrap(), 0.0);
        assert!(close(pair_sum(2.0, 1.0, 1.0).unwrap(), 0.125, 1e-15));
    }

    #[test]
    fn pair_sum_examples() {
        // radius 7 ball: S_2 around it misses the unit ball, so only one cap
        // contributes, 13/64 > 1/8
        assert!(!both_caps_nonempty(2.0, 1.0, 7.0).unwrap());
        assert!(close(pair_sum(2.0, 1.0, 7.0).unwrap(), 13.0 / 64.0, 1e-15));
        assert!(pair_sum(2.0, 1.0, 7.0).unwrap() > 0.125);
        // both caps present just inside the emptiness ratio 2/(rho-1) = 2
        assert!(both_caps_nonempty(2.0, 1.0, 1.9).unwrap());
        assert!(close(pair_sum(2.0, 1.0, 1.9).unwrap(), 0.125, 1e-15));
        assert!(pair_sum(2.0, 1.0, 0.25).unwrap() > 0.125);
        assert!(close(pair_sum(SQRT3, 5.0, 5.0).unwrap(), (2.0 - SQRT3) / 2.0, 1e-15));
    }

    #[test]
    fn geometry_at_reference_ratio() {
        // 50-digit reference values
        let g = RhoGeometry::new(1.755).unwrap();
        assert!(close(g.alpha_min, 0.137_362_774_143_713_53, 1e-15));
        assert!(close(g.alpha_zero, 0.284_980_267_717_684_38, 1e-15));
        assert!(close(g.alpha_max, 0.964_533_171_882_601_89, 1e-15));
    }

    #[test]
    fn geometry_degenerates_near_one() {
        let g = RhoGeometry::new(1.0 + 1e-8).unwrap();
        assert!(g.alpha_max < 1e-3 && g.alpha_zero < 1e-3 && g.alpha_min.abs() < 1e-3);
    }

    #[test]
    fn aux_cap_examples() {
        let g = RhoGeometry::new(2.0).unwrap();
        let at_threshold = aux_cap_radius(2.0, 1.0, 0.75).unwrap();
        assert!(close(at_threshold, (13.0f64 / 14.0).acos(), 1e-15));
        assert!(close(at_threshold, g.alpha_zero, 1e-15));
        // the tangent-cone branch meets the actual cap at the threshold
        let cone = ((1.0 - 0.75) / (1.0 + 0.75f64)).acos() - g.alpha_max;
        assert!(close(cone, at_threshold, 1e-14));

        assert!(close(aux_cap_radius(SQRT3, 1.0, 1.0).unwrap(), PI / 6.0, 1e-15));

        let g = RhoGeometry::new(1.755).unwrap();
        let big = aux_cap_radius(1.755, 1.0, 1e12).unwrap();
        assert!(close(big, g.alpha_max, 1e-5));

        // smallest admissible ball gives alpha_min
        let smallest = aux_cap_radius(1.755, 1.0, 0.755 / 2.0).unwrap();
        assert!(close(smallest, g.alpha_min, 1e-12));
        assert!(matches!(aux_cap_radius(1.755, 1.0, 0.3), Err(Error::Domain(_))));
    }

    #[test]
    fn k_examples() {
        for rho in [1.1, 1.5, SQRT3, 1.755, 2.0, 2.5, 2.9] {
            let g = RhoGeometry::new(rho).unwrap();
            assert!(g.k(g.alpha_min).unwrap().abs() < 1e-12, "rho {rho}");
            let k1 = 2.0 * PI * (1.0 - g.alpha_zero.cos());
            let k2 = {
                let a = g.alpha_zero;
                let tilt = a.cos() / rho - (1.0 - 1.0 / (rho * rho)).sqrt() * a.sin() + 1.0;
                2.0 * PI * (1.0 - ((rho * rho - 1.0) * tilt + 4.0) / (4.0 * rho))
            };
            assert!(close(k1, k2, 1e-12), "rho {rho}: {k1} vs {k2}");
            let closed = 2.0 * PI * (1.0 - (3.0 * rho * rho + 1.0) / (rho * (rho * rho + 3.0)));
            assert!(close(k1, closed, 1e-12));
            assert!(close(g.k(g.alpha_max).unwrap(), 2.0 * PI * (1.0 - 1.0 / rho), 1e-12));
            assert!(g.k(g.alpha_max + 1e-6).is_err());
            assert!(g.k(g.alpha_min - 1e-6).is_err());
        }
    }

    #[test]
    fn k_is_monotone_on_fine_grid() {
        for rho in [1.2, SQRT3, 1.755, 2.6] {
            let g = RhoGeometry::new(rho).unwrap();
            let n = 10_000;
            let mut prev = f64::NEG_INFINITY;
            for i in 0..=n {
                let a = g.alpha_min + g.width() * i as f64 / n as f64;
                let v = g.k(a.min(g.alpha_max)).unwrap();
                assert!(v >= prev - 1e-15, "rho {rho} alpha {a}");
                prev = v;
            }
        }
    }

    #[test]
    fn triangle_examples() {
        let t = triangle_angles(PI / 6.0, PI / 6.0, PI / 6.0).unwrap();
        let third = (1.0f64 / 3.0).acos();
        for a in [t.angle_x, t.angle_y, t.angle_z] {
            assert!(close(a, third, 1e-14));
            assert!(close(a, 1.230_959_417_340_774_7, 1e-14));
        }
        assert!(close(t.area, 0.551_285_598_432_530_8, 1e-14));

        let small = triangle_angles(1e-3, 1e-3, 1e-3).unwrap();
        for a in [small.angle_x, small.angle_y, small.angle_z] {
            assert!(close(a, PI / 3.0, 1e-6));
        }
        assert!(small.area > 0.0 && small.area < 1e-5);
    }

    #[test]
    fn triangle_rejects_invalid_sides() {
        assert!(matches!(triangle_angles(0.0, 0.5, 0.5), Err(Error::Domain(_))));
        assert!(matches!(triangle_angles(2.0, 1.5, 0.5), Err(Error::Domain(_))));
        assert!(matches!(
            triangle_angles(f64::NAN, 0.5, 0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn guard_behaviour() {
        assert_eq!(guarded_acos(1.0 + 5e-13), 0.0);
        assert_eq!(guarded_acos(-1.0 - 5e-13), PI);
        assert!(guarded_acos(1.0 + 1e-9).is_nan());
        assert!(guarded_acos(f64::NAN).is_nan());
    }

    /// Pair-sum and height identities over random pairs with both caps
    /// present; one-sided inequality otherwise.
    #[test]
    fn pair_sum_identity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut both = 0;
        let mut one = 0;
        while both < 10_000 || one < 1_000 {
            let rho = rng.gen_range(1.0001..2.9999);
            let r1 = 10f64.powf(rng.gen_range(-2.0..2.0));
            let r2 = r1 * 10f64.powf(rng.gen_range(-1.5..1.5));
            let s = pair_sum(rho, r1, r2).unwrap();
            if both_caps_nonempty(rho, r1, r2).unwrap() {
                both += 1;
                assert!((s - pair_constant(rho)).abs() < 1e-12);
                let h = cap_height(rho, r1, r2).unwrap() / (rho * r1)
                    + cap_height(rho, r2, r1).unwrap() / (rho * r2);
                assert!((h - 2.0 * pair_constant(rho)).abs() < 1e-12);
            } else {
                one += 1;
                assert!(s > pair_constant(rho) - 1e-12);
            }
        }
    }

    /// Uniform points on S_rho(B1) tested for membership in B2.
    #[test]
    fn coverage_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(rho, r1, r2) in &[(SQRT3, 1.0, 1.0), (1.755, 1.0, 0.6), (2.3, 0.5, 2.0)] {
            let n = 1_000_000;
            let center2 = [r1 + r2, 0.0, 0.0];
            let mut hits = 0u64;
            for _ in 0..n {
                let u: f64 = rng.gen_range(-1.0..1.0);
                let phi: f64 = rng.gen_range(0.0..2.0 * PI);
                let s = (1.0 - u * u).sqrt();
                let p = [rho * r1 * u, rho * r1 * s * phi.cos(), rho * r1 * s * phi.sin()];
                let d2: f64 = (0..3).map(|i| (p[i] - center2[i]).powi(2)).sum();
                if d2 <= r2 * r2 {
                    hits += 1;
                }
            }
            let p_hat = hits as f64 / n as f64;
            let expected = coverage_fraction(rho, r1, r2).unwrap();
            let se = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!(
                (p_hat - expected).abs() < 3.0 * se,
                "rho {rho}: MC {p_hat} vs {expected} (se {se})"
            );
        }
    }

    /// K(aux radius) equals the actual cap area across both branches.
    #[test]
    fn k_matches_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1_000 {
            let rho = rng.gen_range(1.01..2.99);
            let lo = (rho - 1.0) / 2.0;
            let r2 = lo * 10f64.powf(rng.gen_range(0.0..2.5));
            let alpha = aux_cap_radius(rho, 1.0, r2).unwrap();
            let g = RhoGeometry::new(rho).unwrap();
            let k = g.k(alpha).unwrap();
            let direct = 4.0 * PI * coverage_fraction(rho, 1.0, r2).unwrap();
            assert!((k - direct).abs() < 1e-12, "rho {rho} r2 {r2}: {k} vs {direct}");
        }
    }

    /// Caps cut by externally non-overlapping balls tangent to a common ball
    /// stay disjoint.
    #[test]
    fn auxiliary_caps_do_not_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut checked = 0;
        while checked < 20_000 {
            let rho = rng.gen_range(1.05..2.95);
            let lo = (rho - 1.0) / 2.0;
            let rx = lo * 10f64.powf(rng.gen_range(0.0..1.5));
            let ry = lo * 10f64.powf(rng.gen_range(0.0..1.5));
            let theta = rng.gen_range(0.0..PI);
            // centers at distance 1 + r from the unit ball, separated by theta
            let dx = 1.0 + rx;
            let dy = 1.0 + ry;
            let dist2 = dx * dx + dy * dy - 2.0 * dx * dy * theta.cos();
            if dist2 < (rx + ry) * (rx + ry) {
                continue;
            }
            let ax = aux_cap_radius(rho, 1.0, rx).unwrap();
            let ay = aux_cap_radius(rho, 1.0, ry).unwrap();
            assert!(theta >= ax + ay - 1e-9, "rho {rho} rx {rx} ry {ry} theta {theta}");
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn coverage_is_scale_invariant(
            rho in 1.001f64..2.999,
            r1 in 0.01f64..100.0,
            r2 in 0.01f64..100.0,
            s in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0, 1024.0]),
        ) {
            prop_assert_eq!(
                coverage_fraction(rho, s * r1, s * r2).unwrap(),
                coverage_fraction(rho, r1, r2).unwrap()
            );
        }

        #[test]
        fn triangle_angles_permute(
            x in 0.05f64..1.0,
            y in 0.05f64..1.0,
            z in 0.05f64..1.0,
        ) {
            let t = triangle_angles(x, y, z).unwrap();
            let p = triangle_angles(z, x, y).unwrap();
            prop_assert!((p.angle_x - t.angle_z).abs() < 1e-12);
            prop_assert!((p.angle_y - t.angle_x).abs() < 1e-12);
            prop_assert!((p.angle_z - t.angle_y).abs() < 1e-12);
            prop_assert!(t.area > 0.0);
            prop_assert!((t.area - (t.angle_x + t.angle_y + t.angle_z - PI)).abs() < 1e-15);
        }

        #[test]
        fn geometry_orders_angles(rho in 1.000_001f64..2.999_999) {
            let g = RhoGeometry::new(rho).unwrap();
            prop_assert!(0.0 < g.alpha_min);
            prop_assert!(g.alpha_min <= g.alpha_zero);
            prop_assert!(g.alpha_zero <= g.alpha_max);
            prop_assert!(g.alpha_max < PI / 2.0);
        }
    }
}
