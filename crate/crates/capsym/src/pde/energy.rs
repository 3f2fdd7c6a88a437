//! Huber-regularized gauge energy and its minimization.
//!
//! The mixed boundary value problem is solved variationally: minimize
//! `J(u) = (1/p) ∫ F_eps^p(-grad u) - ∫ f u` over fields vanishing on the
//! Dirichlet cells, with `F_eps(xi) = sqrt(|xi|^2 + eps^2) - eps + g . xi`
//! clipped at zero (the clip keeps the integrand convex where the drift
//! term would push the regularized gauge negative near `xi = 0`). The
//! contact condition is natural and never imposed.
//!
//! Gradients are evaluated on bilinear elements spanning 2x2(x2) blocks of
//! adjacent cell centers with full Gauss quadrature, which avoids the
//! checkerboard null modes of cell-centered central differences.

use crate::error::{CapsymError, Result};
use crate::gauge::GaugeDescriptor;
use crate::geometry::grid::{CellClass, GridField, MaskedGrid};
use crate::vecn::VecN;

/// The mixed anisotropic problem: minimize the regularized gauge energy
/// against a source term.
pub struct MixedProblem<'a> {
    pub grid: &'a MaskedGrid,
    pub gauge: &'a GaugeDescriptor,
    pub source: &'a GridField,
    pub p: f64,
    /// Huber smoothing length in gradient units; defaults to the spacing.
    pub eps: f64,
    /// Optimality target: gradient norm relative to the source norm.
    pub tol_rel: f64,
}

impl<'a> MixedProblem<'a> {
    pub fn new(grid: &'a MaskedGrid, gauge: &'a GaugeDescriptor, source: &'a GridField) -> Self {
        MixedProblem {
            grid,
            gauge,
            source,
            p: 2.0,
            eps: grid.spacing(),
            tol_rel: 1e-8,
        }
    }
}

/// Discretized energy over the free (non-pinned) cells. Element corner
/// lists, shape gradients, and drift values are all precomputed.
pub(crate) struct EnergyModel {
    p: f64,
    eps: f64,
    cell_measure: f64,
    /// Corner cell indices per element (first `2^dim` entries used).
    elements: Vec<[usize; 8]>,
    /// Drift vector at each Gauss point of each element.
    drifts: Vec<[VecN; 8]>,
    /// Shape gradient of corner `c` at Gauss point `q` (element-independent).
    shape_grads: [[VecN; 8]; 8],
    n_corners: usize,
    /// Cells free to move (in domain, not Dirichlet, covered by an element).
    pub free: Vec<bool>,
}

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

impl EnergyModel {
    pub fn build(grid: &MaskedGrid, gauge: &GaugeDescriptor, p: f64, eps: f64) -> Result<Self> {
        if eps <= 0.0 {
            return Err(CapsymError::InvalidParameter(format!(
                "Huber eps must be positive, got {eps}"
            )));
        }
        if p < 1.0 {
            return Err(CapsymError::InvalidParameter(format!(
                "exponent p must be >= 1, got {p}"
            )));
        }
        let dim = grid.dim();
        let nc = 1usize << dim;
        let ext = grid.extents();
        let h = grid.spacing();

        // local Gauss offsets in [0,1]^dim and the shape gradients there
        let mut shape_grads = [[VecN::zero(dim); 8]; 8];
        let mut offsets = [[0.0f64; 3]; 8];
        for q in 0..nc {
            for k in 0..dim {
                let sign = if (q >> k) & 1 == 1 { 1.0 } else { -1.0 };
                offsets[q][k] = 0.5 * (1.0 + sign * INV_SQRT3);
            }
            for c in 0..nc {
                let mut g = VecN::zero(dim);
                for k in 0..dim {
                    let dw = if (c >> k) & 1 == 1 { 1.0 } else { -1.0 };
                    let mut v = dw / h;
                    for k2 in 0..dim {
                        if k2 != k {
                            let t = offsets[q][k2];
                            v *= if (c >> k2) & 1 == 1 { t } else { 1.0 - t };
                        }
                    }
                    g[k] = v;
                }
                shape_grads[q][c] = g;
            }
        }

        let mut elements = Vec::new();
        let mut drifts = Vec::new();
        let mut covered = vec![false; grid.num_cells()];
        let kz_range = if dim == 3 { 0..ext[2] - 1 } else { 0..1 };
        for kz in kz_range {
            for j in 0..ext[1] - 1 {
                'cells: for i in 0..ext[0] - 1 {
                    let mut corners = [0usize; 8];
                    for c in 0..nc {
                        let co = [i + (c & 1), j + ((c >> 1) & 1), kz + ((c >> 2) & 1)];
                        let idx = grid.cell_index(co);
                        if !grid.class(idx).in_domain() {
                            continue 'cells;
                        }
                        corners[c] = idx;
                    }
                    let base = grid.cell_center(grid.cell_index([i, j, kz]));
                    let mut dr = [VecN::zero(dim); 8];
                    for (q, d) in dr.iter_mut().enumerate().take(nc) {
                        let mut pos = base;
                        for k in 0..dim {
                            pos[k] += h * offsets[q][k];
                        }
                        // the energy density evaluates the gauge on the
                        // outward co-normal -grad u (the gauge is not
                        // even); negating the drift here turns
                        // F_eps(-grad u) into s - eps + d . grad u with
                        // the tables below left unchanged
                        *d = -(gauge.drift_at(Some(pos))?);
                    }
                    for &c in corners.iter().take(nc) {
                        covered[c] = true;
                    }
                    elements.push(corners);
                    drifts.push(dr);
                }
            }
        }
        let mut free = vec![false; grid.num_cells()];
        for idx in grid.domain_cells() {
            free[idx] = covered[idx] && grid.class(idx) != CellClass::DirichletBoundary;
        }
        Ok(EnergyModel {
            p,
            eps,
            cell_measure: grid.cell_measure(),
            elements,
            drifts,
            shape_grads,
            n_corners: nc,
            free,
        })
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        EnergyModel {
            p: self.p,
            eps,
            cell_measure: self.cell_measure,
            elements: self.elements.clone(),
            drifts: self.drifts.clone(),
            shape_grads: self.shape_grads,
            n_corners: self.n_corners,
            free: self.free.clone(),
        }
    }

    /// Energy `(1/p) ∫ F_eps^p(-grad u)` and its gradient with respect to
    /// the cell values, projected onto the free cells.
    pub fn energy_and_grad(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let nc = self.n_corners;
        let wq = self.cell_measure / nc as f64;
        let e2 = self.eps * self.eps;
        let p2 = self.p == 2.0;
        let mut energy = 0.0;
        let mut grad = vec![0.0f64; u.len()];
        for (corners, dr) in self.elements.iter().zip(&self.drifts) {
            for q in 0..nc {
                let sg = &self.shape_grads[q];
                let mut g = VecN::zero(dr[0].dim());
                for c in 0..nc {
                    g = g + sg[c] * u[corners[c]];
                }
                let d = dr[q];
                let s = (g.dot(&g) + e2).sqrt();
                let f = s - self.eps + d.dot(&g);
                if f <= 0.0 {
                    continue;
                }
                let (dens, dfac) = if p2 {
                    (0.5 * f * f, f)
                } else {
                    (f.powf(self.p) / self.p, f.powf(self.p - 1.0))
                };
                energy += wq * dens;
                let df = (g * (1.0 / s) + d) * (wq * dfac);
                for c in 0..nc {
                    grad[corners[c]] += df.dot(&sg[c]);
                }
            }
        }
        for (i, gr) in grad.iter_mut().enumerate() {
            if !self.free[i] {
                *gr = 0.0;
            }
        }
        (energy, grad)
    }

    /// Hessian of the energy at `u` applied to `v` (generalized
    /// Gauss-Newton form, exact for `p = 2`); projected on free cells.
    /// The Hessian is positive semi-definite by convexity of the clipped
    /// integrand.
    pub fn hess_vec(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let nc = self.n_corners;
        let wq = self.cell_measure / nc as f64;
        let e2 = self.eps * self.eps;
        let p2 = self.p == 2.0;
        let mut out = vec![0.0f64; u.len()];
        for (corners, dr) in self.elements.iter().zip(&self.drifts) {
            for q in 0..nc {
                let sg = &self.shape_grads[q];
                let dim = dr[0].dim();
                let mut g = VecN::zero(dim);
                let mut gv = VecN::zero(dim);
                for c in 0..nc {
                    g = g + sg[c] * u[corners[c]];
                    gv = gv + sg[c] * v[corners[c]];
                }
                let d = dr[q];
                let s = (g.dot(&g) + e2).sqrt();
                let f = s - self.eps + d.dot(&g);
                if f <= 0.0 {
                    continue;
                }
                let (c1, c2) = if p2 {
                    (1.0, f)
                } else {
                    (
                        (self.p - 1.0) * f.powf(self.p - 2.0),
                        f.powf(self.p - 1.0),
                    )
                };
                let w1 = g * (1.0 / s) + d;
                let curve = gv * (1.0 / s) - g * (g.dot(&gv) / (s * s * s));
                let hv = (w1 * (c1 * w1.dot(&gv)) + curve * c2) * wq;
                for c in 0..nc {
                    out[corners[c]] += hv.dot(&sg[c]);
                }
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            if !self.free[i] {
                *o = 0.0;
            }
        }
        out
    }

    /// Diagonal of the Hessian at `u`, used as a Jacobi preconditioner.
    pub fn hess_diag(&self, u: &[f64]) -> Vec<f64> {
        let nc = self.n_corners;
        let wq = self.cell_measure / nc as f64;
        let e2 = self.eps * self.eps;
        let p2 = self.p == 2.0;
        let mut diag = vec![0.0f64; u.len()];
        for (corners, dr) in self.elements.iter().zip(&self.drifts) {
            for q in 0..nc {
                let sg = &self.shape_grads[q];
                let dim = dr[0].dim();
                let mut g = VecN::zero(dim);
                for c in 0..nc {
                    g = g + sg[c] * u[corners[c]];
                }
                let d = dr[q];
                let s = (g.dot(&g) + e2).sqrt();
                let f = s - self.eps + d.dot(&g);
                if f <= 0.0 {
                    continue;
                }
                let (c1, c2) = if p2 {
                    (1.0, f)
                } else {
                    (
                        (self.p - 1.0) * f.powf(self.p - 2.0),
                        f.powf(self.p - 1.0),
                    )
                };
                let w1 = g * (1.0 / s) + d;
                for c in 0..nc {
                    let a = w1.dot(&sg[c]);
                    let gs = g.dot(&sg[c]);
                    let curv = sg[c].dot(&sg[c]) / s - gs * gs / (s * s * s);
                    diag[corners[c]] += wq * (c1 * a * a + c2 * curv);
                }
            }
        }
        diag
    }
}

/// Diagnostics from a variational solve.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    pub energy_trace: Vec<f64>,
    pub grad_norm: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Damped Newton iteration with a Jacobi-preconditioned conjugate
/// gradient inner solve. The energy is convex, so the (generalized
/// Gauss-Newton) Hessian is positive semi-definite and every Newton
/// direction is a descent direction; Armijo backtracking enforces a
/// monotone energy trace.
fn newton_pcg(
    u: &mut Vec<f64>,
    model: &EnergyModel,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveDiagnostics> {
    let n = u.len();
    let objective = |v: &[f64]| -> (f64, Vec<f64>) {
        let (e, mut g) = model.energy_and_grad(v);
        let mut j = e;
        for i in 0..n {
            j -= b[i] * v[i];
            g[i] -= b[i];
            if !model.free[i] {
                g[i] = 0.0;
            }
        }
        (j, g)
    };
    let (mut j_cur, mut g) = objective(u);
    let mut trace = vec![j_cur];
    let g0_norm = dot(&g, &g).sqrt();
    let mut iterations = 0usize;
    loop {
        let g_norm = dot(&g, &g).sqrt();
        if g_norm <= tol {
            break;
        }
        if iterations >= max_iter {
            return Err(CapsymError::SolverDiverged(format!(
                "Newton gradient norm {g_norm:.3e} (target {tol:.3e}) after {iterations} steps"
            )));
        }
        // Jacobi preconditioner, floored to stay invertible where the
        // clipped integrand is flat
        let mut diag = model.hess_diag(u);
        let dmax = diag.iter().cloned().fold(0.0f64, f64::max);
        let mut x = vec![0.0f64; n];
        if dmax > 0.0 {
            // Levenberg damping: the clipped integrand is flat wherever the
            // drift dominates the gradient, so the plain Hessian can be
            // singular; a small relative shift keeps CG well posed without
            // affecting the fast local convergence.
            let delta = 1e-9 * dmax;
            for d in diag.iter_mut() {
                *d += delta;
            }
            // inexact Newton: forcing term tightens as the gradient shrinks
            let eta = 0.5f64.min((g_norm / g0_norm).sqrt()).max(1e-4);
            let cg_tol = eta * g_norm;
            let mut r: Vec<f64> = g.iter().map(|v| -v).collect();
            let mut z: Vec<f64> = (0..n)
                .map(|i| if model.free[i] { r[i] / diag[i] } else { 0.0 })
                .collect();
            let mut p_dir = z.clone();
            let mut rz = dot(&r, &z);
            let max_cg = 20_000usize;
            for _ in 0..max_cg {
                if dot(&r, &r).sqrt() <= cg_tol || !(rz > 0.0) {
                    break;
                }
                let mut hp = model.hess_vec(u, &p_dir);
                for i in 0..n {
                    if model.free[i] {
                        hp[i] += delta * p_dir[i];
                    }
                }
                let php = dot(&p_dir, &hp);
                if !(php > 1e-300) {
                    break; // flat or non-finite direction: keep the partial solve
                }
                let alpha = rz / php;
                for i in 0..n {
                    x[i] += alpha * p_dir[i];
                    r[i] -= alpha * hp[i];
                }
                for i in 0..n {
                    z[i] = if model.free[i] { r[i] / diag[i] } else { 0.0 };
                }
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for i in 0..n {
                    p_dir[i] = z[i] + beta * p_dir[i];
                }
            }
        }
        let mut dir = x;
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            // CG produced no descent (fully flat region): steepest descent
            dir = g.iter().map(|v| -v).collect();
            slope = -g_norm * g_norm;
        }
        let mut alpha = 1.0f64;
        let mut accepted = None;
        // allow for cancellation noise in the assembled energy when the
        // predicted decrease drops towards machine precision
        let slack = 8.0 * f64::EPSILON * j_cur.abs();
        for _ in 0..60 {
            let cand: Vec<f64> = (0..n).map(|i| u[i] + alpha * dir[i]).collect();
            let (j_new, g_new) = objective(&cand);
            if j_new <= j_cur + 1e-4 * alpha * slope + slack {
                accepted = Some((cand, j_new, g_new));
                break;
            }
            alpha *= 0.5;
        }
        let (u_new, j_new, g_new) = accepted.ok_or_else(|| {
            CapsymError::SolverDiverged(format!(
                "line search stalled: |g|={g_norm:.3e} (target {tol:.3e}, start \
                 {g0_norm:.3e}), slope={slope:.3e}, J={j_cur:.6e}, iter {iterations}"
            ))
        })?;
        *u = u_new;
        j_cur = j_new;
        g = g_new;
        trace.push(j_cur);
        iterations += 1;
    }
    Ok(SolveDiagnostics {
        iterations,
        energy_trace: trace,
        grad_norm: dot(&g, &g).sqrt(),
    })
}

/// Minimize `J(u) = (1/p) ∫ F_eps^p(-grad u) - ∫ f u`, the gauge acting
/// on the outward co-normal of the level sets. For small `eps`
/// the solve continues from larger smoothing lengths (warm-started
/// continuation), since the energy stiffens near critical points of `u`
/// as `eps` shrinks.
pub fn solve_mixed_bvp(problem: &MixedProblem) -> Result<(GridField, SolveDiagnostics)> {
    let grid = problem.grid;
    if grid.dirichlet_cells().is_empty() {
        return Err(CapsymError::InvalidParameter(
            "mixed problem needs a Dirichlet part of the boundary".into(),
        ));
    }
    let model = EnergyModel::build(grid, problem.gauge, problem.p, problem.eps)?;
    let cm = grid.cell_measure();
    let n = grid.num_cells();
    let mut b = vec![0.0f64; n];
    for idx in 0..n {
        if model.free[idx] {
            b[idx] = problem.source.values[idx] * cm;
        }
    }
    let b_norm = dot(&b, &b).sqrt();
    if b_norm == 0.0 {
        return Ok((
            GridField { values: vec![0.0; n] },
            SolveDiagnostics {
                iterations: 0,
                energy_trace: vec![0.0],
                grad_norm: 0.0,
            },
        ));
    }
    let tol = problem.tol_rel * b_norm;

    // continuation schedule down to the requested eps
    let mut schedule = vec![problem.eps];
    let mut e = problem.eps;
    while e < 0.99 * grid.spacing() {
        e *= 10.0;
        schedule.push(e.min(grid.spacing()));
    }
    schedule.reverse();

    let mut u = vec![0.0f64; n];
    let mut total_iters = 0usize;
    let mut trace = Vec::new();
    let mut grad_norm = 0.0;
    let stages = schedule.len();
    for (stage, &eps) in schedule.iter().enumerate() {
        let m = model.with_eps(eps);
        let stage_tol = if stage + 1 == stages { tol } else { 100.0 * tol };
        let diag = newton_pcg(&mut u, &m, &b, stage_tol, 200)?;
        total_iters += diag.iterations;
        // the energy functional changes between continuation stages, so
        // only the final stage's trace is meaningful as a descent record
        trace = diag.energy_trace;
        grad_norm = diag.grad_norm;
    }
    Ok((
        GridField { values: u },
        SolveDiagnostics {
            iterations: total_iters,
            energy_trace: trace,
            grad_norm,
        },
    ))
}

/// Total regularized energy `(1/p) ∫ F_eps^p(-grad u)`, exposed for the
/// convexity property test and the eigen solver.
pub fn huber_energy(
    grid: &MaskedGrid,
    gauge: &GaugeDescriptor,
    u: &GridField,
    p: f64,
    eps: f64,
) -> Result<f64> {
    let model = EnergyModel::build(grid, gauge, p, eps)?;
    Ok(model.energy_and_grad(&u.values).0)
}
