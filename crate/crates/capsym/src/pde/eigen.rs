//! First eigenvalue of the gauge energy with mixed boundary conditions.
//!
//! Minimizes the Rayleigh quotient `∫ F_eps^2(grad u) / ∫ u^2` over fields
//! vanishing on the Dirichlet cells, by projected gradient descent with
//! Barzilai-Borwein steps and renormalization after every iteration.

use crate::error::{CapsymError, Result};
use crate::gauge::GaugeDescriptor;
use crate::geometry::grid::{GridField, MaskedGrid};

use super::energy::EnergyModel;

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Non-negative eigenfunction with `∫ u^2 = 1`.
    pub eigenfunction: GridField,
    /// Rayleigh quotient per iteration.
    pub rayleigh_history: Vec<f64>,
    pub iterations: usize,
}

/// Minimize the Rayleigh quotient of the (Huber-regularized) gauge energy.
pub fn first_eigenvalue(
    grid: &MaskedGrid,
    gauge: &GaugeDescriptor,
    eps: f64,
) -> Result<EigenResult> {
    if grid.dirichlet_cells().is_empty() {
        return Err(CapsymError::InvalidParameter(
            "eigenvalue problem needs a Dirichlet part of the boundary".into(),
        ));
    }
    let model = EnergyModel::build(grid, gauge, 2.0, eps)?;
    let cm = grid.cell_measure();
    let n = grid.num_cells();

    // smooth positive initial guess, zero where pinned
    let mut u: Vec<f64> = (0..n)
        .map(|idx| {
            if model.free[idx] {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let normalize = |u: &mut [f64]| {
        let m = (dot(u, u) * cm).sqrt();
        if m > 0.0 {
            u.iter_mut().for_each(|v| *v /= m);
        }
    };
    normalize(&mut u);

    // quotient: 2 * model energy (the model carries 1/p) over the mass
    let quotient_and_grad = |u: &[f64]| -> (f64, Vec<f64>) {
        let (e, ge) = model.energy_and_grad(u);
        let mass = dot(u, u) * cm; // = 1 after normalization
        let q = 2.0 * e / mass;
        let mut g: Vec<f64> = (0..u.len())
            .map(|i| (2.0 * ge[i] - q * 2.0 * u[i] * cm) / mass)
            .collect();
        for i in 0..u.len() {
            if !model.free[i] {
                g[i] = 0.0;
            }
        }
        (q, g)
    };

    let (mut q_cur, mut g) = quotient_and_grad(&u);
    let mut history = vec![q_cur];
    let mut prev_u: Option<Vec<f64>> = None;
    let mut prev_g: Option<Vec<f64>> = None;
    let mut alpha = cm; // conservative first step
    let max_iter = 200_000usize;
    let mut stable = 0usize;
    let mut iterations = 0usize;
    while stable < 20 {
        if iterations >= max_iter {
            return Err(CapsymError::SolverDiverged(format!(
                "Rayleigh iteration at {q_cur:.6e} did not settle in {iterations} steps"
            )));
        }
        if let (Some(pu), Some(pg)) = (&prev_u, &prev_g) {
            let s: Vec<f64> = (0..n).map(|i| u[i] - pu[i]).collect();
            let y: Vec<f64> = (0..n).map(|i| g[i] - pg[i]).collect();
            let sy = dot(&s, &y);
            if sy > 1e-30 {
                alpha = dot(&s, &s) / sy;
            }
        }
        prev_u = Some(u.clone());
        prev_g = Some(g.clone());
        for i in 0..n {
            u[i] -= alpha * g[i];
        }
        normalize(&mut u);
        let (q_new, g_new) = quotient_and_grad(&u);
        if (q_new - q_cur).abs() <= 1e-10 * q_cur.abs().max(1e-30) {
            stable += 1;
        } else {
            stable = 0;
        }
        q_cur = q_new;
        g = g_new;
        history.push(q_cur);
        iterations += 1;
    }

    // the quotient is even in u: fold to the non-negative representative
    u.iter_mut().for_each(|v| *v = v.abs());
    normalize(&mut u);
    let (q_final, _) = quotient_and_grad(&u);
    history.push(q_final);
    Ok(EigenResult {
        eigenvalue: q_final,
        eigenfunction: GridField { values: u },
        rayleigh_history: history,
        iterations,
    })
}

/// Best constant in `∫ u^2 <= C ∫ F_eps^2(grad u)`: the reciprocal of the
/// first eigenvalue.
pub fn poincare_constant(grid: &MaskedGrid, gauge: &GaugeDescriptor, eps: f64) -> Result<f64> {
    Ok(1.0 / first_eigenvalue(grid, gauge, eps)?.eigenvalue)
}
