//! Area bounds on `k_d` in arbitrary dimension.
//!
//! Every quantity is built from the profile integral
//! `∫_0^u t^((d-3)/2) (1-t)^(-1/2) dt`. With `t = sin^2 θ` it becomes
//! `∫_0^θ 2 sin^(d-2) s ds`, whose integrand is smooth, so it is evaluated in
//! that form. Only ratios of profile integrals enter the bounds, so no gamma
//! function is involved there.

use std::f64::consts::PI;

use crate::quadrature;
use crate::{Error, Result};

pub const MIN_DIMENSION: u32 = 3;
pub const MAX_DIMENSION: u32 = 64;

const REL_TOL: f64 = 1e-14;

fn check_dimension(d: u32) -> Result<()> {
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        return Err(Error::domain(format!(
            "dimension must lie in {MIN_DIMENSION}..={MAX_DIMENSION}, got {d}"
        )));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 1.0 && rho < 3.0) {
        return Err(Error::domain(format!("inflation ratio must lie in (1, 3), got {rho}")));
    }
    Ok(())
}

/// `∫_0^θ 2 sin^(d-2) s ds`, equal to the profile integral up to `sin^2 θ`.
fn profile_integral(d: u32, theta: f64) -> f64 {
    if theta <= 0.0 {
        return 0.0;
    }
    let power = (d - 2) as i32;
    let f = |s: f64| 2.0 * s.sin().powi(power);
    let rough = quadrature::integrate_panels(f, 0.0, theta, 4);
    quadrature::integrate(f, 0.0, theta, REL_TOL * rough.abs() + f64::MIN_POSITIVE)
}

/// Profile integral up to an arbitrary upper limit `u` in `[0, 1]`.
fn profile_to(d: u32, u: f64) -> f64 {
    profile_integral(d, u.clamp(0.0, 1.0).sqrt().asin())
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: u32) -> f64 {
    let (mut value, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < k as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area of the unit sphere in `R^d`, `2 π^(d/2) / Γ(d/2)`.
pub fn sphere_area(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(Error::domain("dimension must be positive"));
    }
    Ok(2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d))
}

/// `(d-1)`-dimensional area of a cap of angular radius `alpha` on the unit
/// sphere in `R^d`.
pub fn cap_area_d(d: u32, alpha: f64) -> Result<f64> {
    check_dimension(d)?;
    if !(0.0..=PI / 2.0).contains(&alpha) {
        return Err(Error::domain(format!("cap radius must lie in [0, pi/2], got {alpha}")));
    }
    // area of the unit (d-2)-sphere times ∫ sin^(d-2); the profile integral
    // carries an extra factor 2
    let boundary = sphere_area(d - 1)?;
    Ok(boundary * 0.5 * profile_integral(d, alpha))
}

/// Value minimized when two tangent balls are congruent: the sum of the two
/// profile integrals for caps with `cos α = x` and `cos β = c - x`.
pub fn g_profile(d: u32, c: f64, x: f64) -> Result<f64> {
    check_dimension(d)?;
    if !(c > 1.0 && c < 2.0) {
        return Err(Error::domain(format!("constant C must lie in (1, 2), got {c}")));
    }
    if !(x >= c - 1.0 && x <= 1.0) {
        return Err(Error::domain(format!("x must lie in [C-1, 1] = [{}, 1], got {x}", c - 1.0)));
    }
    Ok(profile_integral(d, x.acos()) + profile_integral(d, (c - x).acos()))
}

/// Minimum of `a(X,Y) + a(Y,X)` over tangent pairs in dimension `d`.
pub fn f_d(d: u32, rho: f64) -> Result<f64> {
    check_dimension(d)?;
    check_rho(rho)?;
    let c = (rho * rho + 3.0) / (4.0 * rho);
    Ok(profile_to(d, 1.0 - c * c) / profile_integral(d, PI / 2.0))
}

/// The area bound `a(d) = 2 / f_d(√3)`.
pub fn a_of_d(d: u32) -> Result<f64> {
    check_dimension(d)?;
    Ok(2.0 * profile_integral(d, PI / 2.0) / profile_integral(d, PI / 6.0))
}

/// Bound on `k_d` for one inflation ratio, taking the covered proportion to
/// be at most 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimBoundResult {
    pub d: u32,
    pub rho: f64,
    pub f_d: f64,
    pub bound: f64,
}

pub fn k_bound_highdim(d: u32, rho: f64) -> Result<DimBoundResult> {
    let f = f_d(d, rho)?;
    Ok(DimBoundResult {
        d,
        rho,
        f_d: f,
        bound: 2.0 / f,
    })
}

/// Rounds `value` up at the given number of decimals, for reporting strict
/// upper bounds.
pub fn round_up(value: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (value * scale).ceil() / scale
}
