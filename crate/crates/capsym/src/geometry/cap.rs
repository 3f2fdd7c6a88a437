//! Spherical-cap constants and geometry.
//!
//! The isoperimetric extremal outside a convex obstacle is the spherical
//! cap `B_r^+(-r lambda e_n)`: the ball of radius `r` centered at
//! `-r lambda e_n`, intersected with the upper half-space. `kappa_lambda`
//! is the volume of the unit cap.

use crate::error::{CapsymError, Result};
use crate::quad::adaptive_simpson;

/// Volume of the Euclidean unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

fn check(lambda: f64, n: usize) -> Result<()> {
    if lambda.abs() >= 1.0 || !lambda.is_finite() {
        return Err(CapsymError::InvalidParameter(format!(
            "lambda must lie strictly inside (-1,1), got {lambda}"
        )));
    }
    if n < 2 {
        return Err(CapsymError::InvalidParameter(format!(
            "cap dimension must be >= 2, got {n}"
        )));
    }
    Ok(())
}

/// `kappa_lambda = |B_1(-lambda e_n) ∩ R^n_+|`.
///
/// Closed forms in dimensions 2 (circular segment) and 3 (spherical cap),
/// adaptive quadrature of the slice volumes for `n >= 4`.
pub fn cap_constant(lambda: f64, n: usize) -> Result<f64> {
    check(lambda, n)?;
    let v = match n {
        2 => lambda.acos() - lambda * (1.0 - lambda * lambda).sqrt(),
        3 => std::f64::consts::PI * (1.0 - lambda).powi(2) * (2.0 + lambda) / 3.0,
        _ => {
            let slice = unit_ball_volume(n - 1);
            let f = |t: f64| {
                let s = t + lambda;
                (1.0 - s * s).max(0.0).powf((n as f64 - 1.0) / 2.0)
            };
            slice * adaptive_simpson(&f, 0.0, 1.0 - lambda, 1e-10)
        }
    };
    Ok(v)
}

/// Radius of the cap of volume `vol`: `r = (vol / kappa_lambda)^{1/n}`.
pub fn cap_radius_for_volume(vol: f64, lambda: f64, n: usize) -> Result<f64> {
    if vol < 0.0 {
        return Err(CapsymError::InvalidParameter(format!(
            "volume must be non-negative, got {vol}"
        )));
    }
    Ok((vol / cap_constant(lambda, n)?).powf(1.0 / n as f64))
}

/// Area of the free (curved) boundary of the cap of radius `r`:
/// the part of the sphere above the half-space boundary.
pub fn cap_free_area(lambda: f64, n: usize, r: f64) -> Result<f64> {
    check(lambda, n)?;
    let v = match n {
        2 => 2.0 * r * lambda.acos(),
        3 => 2.0 * std::f64::consts::PI * r * r * (1.0 - lambda),
        _ => {
            // surface of the unit sphere with x_n > -lambda on the sphere
            // centered at origin, i.e. polar angle up to acos(lambda)
            let sphere_slice = (n - 1) as f64 * unit_ball_volume(n - 1);
            let f = |theta: f64| theta.sin().powi(n as i32 - 2);
            sphere_slice * r.powi(n as i32 - 1) * adaptive_simpson(&f, 0.0, lambda.acos(), 1e-10)
        }
    };
    Ok(v)
}

/// Area of the wetted boundary: the flat disk where the cap meets the
/// half-space boundary, radius `r sqrt(1 - lambda^2)`.
pub fn cap_wet_area(lambda: f64, n: usize, r: f64) -> Result<f64> {
    check(lambda, n)?;
    let a = r * (1.0 - lambda * lambda).sqrt();
    Ok(unit_ball_volume(n - 1) * a.powi(n as i32 - 1))
}

/// Capillary energy `P_lambda` of the cap: free area minus `lambda` times
/// wet area. Coincides with `n kappa_lambda^{1/n} vol^{(n-1)/n}`.
pub fn cap_energy(lambda: f64, n: usize, r: f64) -> Result<f64> {
    Ok(cap_free_area(lambda, n, r)? - lambda * cap_wet_area(lambda, n, r)?)
}

/// Full cap description for a given radius.
#[derive(Debug, Clone, Copy)]
pub struct CapGeometry {
    pub lambda: f64,
    pub dim: usize,
    pub radius: f64,
    pub kappa_lambda: f64,
    pub volume: f64,
}

impl CapGeometry {
    pub fn new(lambda: f64, dim: usize, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(CapsymError::InvalidParameter(format!(
                "cap radius must be positive, got {radius}"
            )));
        }
        let kappa = cap_constant(lambda, dim)?;
        Ok(CapGeometry {
            lambda,
            dim,
            radius,
            kappa_lambda: kappa,
            volume: kappa * radius.powi(dim as i32),
        })
    }

    pub fn for_volume(lambda: f64, dim: usize, vol: f64) -> Result<Self> {
        Self::new(lambda, dim, cap_radius_for_volume(vol, lambda, dim)?)
    }
}
