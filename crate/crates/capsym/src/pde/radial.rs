//! The symmetrized radial problem and the rearranged upper profile.
//!
//! On the cap of radius `r` the mixed problem with rearranged source `f#`
//! reduces to a first-order ODE in the cap-radius coordinate:
//! `v'(rho) = -G(kappa rho^n) / (n kappa rho^{n-1})` with
//! `G(xi) = ∫_0^xi f#`, integrated from the zero boundary value at `rho = r`.

use crate::error::{CapsymError, Result};
use crate::geometry::cap::cap_constant;
use crate::quad::adaptive_simpson;
use crate::rearrange::RadialProfile;

/// Exact cumulative integral of a step profile: `G(xi) = ∫_0^xi f#(s) ds`.
pub struct CumulativeSource {
    cell_measure: f64,
    prefix: Vec<f64>,
    values: Vec<f64>,
}

impl CumulativeSource {
    pub fn from_profile(f_sharp: &RadialProfile) -> Result<Self> {
        if f_sharp.values().iter().any(|&v| v < 0.0) {
            return Err(CapsymError::InvalidParameter(
                "source rearrangement must be non-negative".into(),
            ));
        }
        let values = f_sharp.values().to_vec();
        let cm = f_sharp.total_volume / values.len().max(1) as f64;
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for v in &values {
            acc += v * cm;
            prefix.push(acc);
        }
        Ok(CumulativeSource {
            cell_measure: cm,
            prefix,
            values,
        })
    }

    pub fn eval(&self, xi: f64) -> f64 {
        if xi <= 0.0 || self.values.is_empty() {
            return 0.0;
        }
        let k = (xi / self.cell_measure) as usize;
        if k >= self.values.len() {
            return *self.prefix.last().unwrap();
        }
        self.prefix[k] + self.values[k] * (xi - k as f64 * self.cell_measure)
    }
}

/// Solution of the symmetrized radial ODE on `[0, r]`.
pub struct RadialSolution {
    pub r: f64,
    pub lambda: f64,
    pub n: usize,
    pub kappa: f64,
    source: CumulativeSource,
    /// `(rho, v(rho))` samples for export; evaluation is by quadrature.
    pub mesh: Vec<(f64, f64)>,
}

const MESH_POINTS: usize = 2048;

/// Integrate the ODE for a rearranged source. The stored mesh refines
/// toward `rho = 0` where the `rho^{1-n}` factor lives; evaluation never
/// divides at zero since the integral form is used throughout.
pub fn solve_radial_ode(
    f_sharp: &RadialProfile,
    r: f64,
    lambda: f64,
    n: usize,
) -> Result<RadialSolution> {
    if r <= 0.0 {
        return Err(CapsymError::InvalidParameter(format!(
            "cap radius must be positive, got {r}"
        )));
    }
    let kappa = cap_constant(lambda, n)?;
    let source = CumulativeSource::from_profile(f_sharp)?;
    let mut sol = RadialSolution {
        r,
        lambda,
        n,
        kappa,
        source,
        mesh: Vec::new(),
    };
    let mesh: Vec<(f64, f64)> = (0..=MESH_POINTS)
        .map(|k| {
            // quadratic clustering toward rho = 0
            let t = k as f64 / MESH_POINTS as f64;
            let rho = r * t * t;
            (rho, sol.eval_v(rho))
        })
        .collect();
    sol.mesh = mesh;
    Ok(sol)
}

impl RadialSolution {
    fn integrand(&self, t: f64) -> f64 {
        // G(kappa t^n) / (n kappa t^{n-1}); at t -> 0 this behaves like
        // f#(0) t / n, so evaluate the limit form near zero
        if t <= 0.0 {
            return 0.0;
        }
        self.source.eval(self.kappa * t.powi(self.n as i32))
            / (self.n as f64 * self.kappa * t.powi(self.n as i32 - 1))
    }

    /// `v(rho) = ∫_rho^r G(kappa t^n) / (n kappa t^{n-1}) dt`.
    pub fn eval_v(&self, rho: f64) -> f64 {
        let rho = rho.clamp(0.0, self.r);
        if rho >= self.r {
            return 0.0;
        }
        adaptive_simpson(&|t| self.integrand(t), rho, self.r, 1e-12)
    }

    /// `v'(rho)`, with the one-sided limit `v'(0) = 0`.
    pub fn eval_v_prime(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        -self.integrand(rho)
    }

    /// The rearrangement of `v` as a function of measure: since `v` is
    /// radially non-increasing, `v#(s) = v((s/kappa)^{1/n})`.
    pub fn eval_v_sharp(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.eval_v(0.0);
        }
        self.eval_v((s / self.kappa).powf(1.0 / self.n as f64))
    }
}

/// Right-hand profile of the rearrangement bound:
/// `s -> (n kappa^{1/n})^{-2} ∫_s^{vol} xi^{2/n - 2} G(xi) d xi`.
/// Coincides with `v#` of the radial solution on the cap of volume `vol`.
pub struct TalentiProfile {
    pub omega_vol: f64,
    pub lambda: f64,
    pub n: usize,
    pub kappa: f64,
    source: CumulativeSource,
}

pub fn talenti_upper_profile(
    f_sharp: &RadialProfile,
    omega_vol: f64,
    lambda: f64,
    n: usize,
) -> Result<TalentiProfile> {
    Ok(TalentiProfile {
        omega_vol,
        lambda,
        n,
        kappa: cap_constant(lambda, n)?,
        source: CumulativeSource::from_profile(f_sharp)?,
    })
}

impl TalentiProfile {
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.omega_vol);
        if s >= self.omega_vol {
            return 0.0;
        }
        let expo = 2.0 / self.n as f64 - 2.0;
        // the integrand is ~ f#(0) xi^{2/n - 1} near zero: integrable, but
        // unbounded for n > 2, so keep the quadrature off the endpoint
        let floor = 1e-14 * self.omega_vol;
        let lo = s.max(floor);
        let integral = adaptive_simpson(&|xi| xi.powf(expo) * self.source.eval(xi), lo, self.omega_vol, 1e-12);
        let scale = (self.n as f64 * self.kappa.powf(1.0 / self.n as f64)).powi(-2);
        scale * integral
    }
}
