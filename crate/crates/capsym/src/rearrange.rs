//! Distribution functions, decreasing rearrangement, and the capillary
//! Schwartz symmetrization.
//!
//! The symmetrization of a non-negative field `u` replaces each super-level
//! set by the spherical cap of the same volume sitting on the half-space
//! boundary: `u*(x) = u#(kappa_lambda rho(x)^n)`, where `u#` is the
//! decreasing rearrangement and `rho(x)` is the cap-radius coordinate of
//! `x` (the radius of the unique cap boundary through `x`).

use crate::error::{CapsymError, Result};
use crate::gauge::GaugeDescriptor;
use crate::geometry::cap::cap_constant;
use crate::geometry::grid::{CellClass, GridField, MaskedGrid};
use crate::geometry::obstacle::{ConvexObstacle, OuterShape};
use crate::geometry::surface::{extract_surface, LevelSet};
use crate::vecn::VecN;
use crate::verify::report::{inequality_tol, VerificationReport};

/// Distribution function of a non-negative grid field: `mu(t) = |{u > t}|`
/// at a sorted list of thresholds.
#[derive(Debug, Clone)]
pub struct LevelProfile {
    pub thresholds: Vec<f64>,
    pub measures: Vec<f64>,
    pub total_volume: f64,
}

const DEFAULT_LEVELS: usize = 512;

fn require_nonneg(grid: &MaskedGrid, u: &GridField) -> Result<()> {
    if grid.domain_cells().iter().any(|&i| u.values[i] < 0.0) {
        return Err(CapsymError::InvalidParameter(
            "field must be non-negative".into(),
        ));
    }
    Ok(())
}

/// Compute `mu(t)` at the given thresholds, or at the 512-quantile grid of
/// the field's values by default.
pub fn distribution(
    grid: &MaskedGrid,
    u: &GridField,
    levels: Option<&[f64]>,
) -> Result<LevelProfile> {
    require_nonneg(grid, u)?;
    let cells = grid.domain_cells();
    let mut vals: Vec<f64> = cells.iter().map(|&i| u.values[i]).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let thresholds: Vec<f64> = match levels {
        Some(ts) => {
            let mut ts = ts.to_vec();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts
        }
        None => (0..DEFAULT_LEVELS)
            .map(|j| {
                let q = (j as f64 + 0.5) / DEFAULT_LEVELS as f64;
                vals[((q * vals.len() as f64) as usize).min(vals.len() - 1)]
            })
            .collect(),
    };
    let cm = grid.cell_measure();
    // vals ascending: mu(t) = cm * #(vals > t) via binary search
    let measures = thresholds
        .iter()
        .map(|&t| (vals.len() - vals.partition_point(|&v| v <= t)) as f64 * cm)
        .collect();
    Ok(LevelProfile {
        thresholds,
        measures,
        total_volume: vals.len() as f64 * cm,
    })
}

/// Cap-radius coordinate: the unique `rho >= 0` with
/// `|x + rho lambda e_n| = rho`. The map `rho -> |x + rho lambda e_n| - rho`
/// is strictly decreasing for `|lambda| < 1`, so bisection applies.
pub fn rho_coordinate(x: VecN, lambda: f64) -> f64 {
    let n = x.dim();
    let f = |rho: f64| {
        let mut y = x;
        y[n - 1] += rho * lambda;
        y.norm() - rho
    };
    if x.norm() == 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64;
    let mut hi = x.norm() / (1.0 - lambda.abs()) + 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Decreasing rearrangement plus the cap evaluator. The profile keeps the
/// exact step function built from the sorted cell values, so rearranged
/// `L^q` norms match the input norms to rounding.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub lambda: f64,
    pub dim: usize,
    pub kappa: f64,
    /// Radius of the cap holding the whole domain volume.
    pub r_max: f64,
    pub total_volume: f64,
    cell_measure: f64,
    /// Field values sorted in decreasing order; `u#` is the step function
    /// taking value `sorted[k]` on `[k cm, (k+1) cm)`.
    sorted: Vec<f64>,
}

impl RadialProfile {
    /// `u#(s)`: right-continuous non-increasing step function, zero past
    /// the domain volume.
    pub fn eval_sharp(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.sorted.first().copied().unwrap_or(0.0);
        }
        let k = (s / self.cell_measure) as usize;
        self.sorted.get(k).copied().unwrap_or(0.0)
    }

    /// `u*(x) = u#(kappa rho(x)^n)`.
    pub fn eval_at(&self, x: VecN) -> f64 {
        let rho = rho_coordinate(x, self.lambda);
        self.eval_sharp(self.kappa * rho.powi(self.dim as i32))
    }

    /// The monotone `s`-mesh carrying the step values.
    pub fn s_mesh(&self) -> Vec<f64> {
        (0..self.sorted.len())
            .map(|k| k as f64 * self.cell_measure)
            .collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    /// Exact `L^q` norm of the rearranged function (layer-cake identity).
    pub fn lq_norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return self.sorted.first().copied().unwrap_or(0.0);
        }
        let sum: f64 = self.sorted.iter().map(|v| v.powf(q)).sum();
        (sum * self.cell_measure).powf(1.0 / q)
    }

    /// Half-space grid just large enough to hold the support cap.
    pub fn cap_grid(&self, spacing: f64) -> Result<MaskedGrid> {
        let r = self.r_max * 1.05 + 2.0 * spacing;
        let height = r * (1.0 - self.lambda);
        let (min, max) = if self.dim == 2 {
            (VecN::new(&[-r, 0.0]), VecN::new(&[r, height]))
        } else {
            (VecN::new(&[-r, -r, 0.0]), VecN::new(&[r, r, height]))
        };
        MaskedGrid::build(
            ConvexObstacle::lower_half_space(self.dim),
            &OuterShape::Box { min, max },
            spacing,
        )
    }

    /// Sample `u*` at the domain cells of a (half-space) grid.
    pub fn evaluate_on(&self, grid: &MaskedGrid) -> GridField {
        GridField::from_fn(grid, |p| self.eval_at(p))
    }
}

/// Capillary Schwartz symmetrization of a non-negative field.
pub fn capillary_symmetrize(grid: &MaskedGrid, u: &GridField, lambda: f64) -> Result<RadialProfile> {
    require_nonneg(grid, u)?;
    let dim = grid.dim();
    let kappa = cap_constant(lambda, dim)?;
    let mut sorted: Vec<f64> = grid.domain_cells().iter().map(|&i| u.values[i]).collect();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let total_volume = sorted.len() as f64 * grid.cell_measure();
    Ok(RadialProfile {
        lambda,
        dim,
        kappa,
        r_max: (total_volume / kappa).powf(1.0 / dim as f64),
        total_volume,
        cell_measure: grid.cell_measure(),
        sorted,
    })
}

/// Plain decreasing rearrangement (`lambda = 0` evaluator).
pub fn decreasing_rearrangement(grid: &MaskedGrid, u: &GridField) -> Result<RadialProfile> {
    capillary_symmetrize(grid, u, 0.0)
}

/// Cell-wise gradients by central differences. One-sided toward the
/// obstacle; at the outer boundary a zero ghost value is used when the
/// boundary cell itself vanishes (the discrete `W_0` case, capturing the
/// final drop to zero), one-sided otherwise.
pub fn cell_gradients(grid: &MaskedGrid, u: &GridField) -> Vec<VecN> {
    let h = grid.spacing();
    let mut out = vec![VecN::zero(grid.dim()); grid.num_cells()];
    for idx in grid.domain_cells() {
        let here = u.values[idx];
        let mut g = VecN::zero(grid.dim());
        for k in 0..grid.dim() {
            let side = |dir: i64| -> Option<f64> {
                match grid.neighbor(idx, k, dir) {
                    Some(j) if grid.class(j).in_domain() => Some(u.values[j]),
                    nb => {
                        let on_obstacle = nb
                            .map(|j| grid.obstacle().signed_distance(grid.cell_center(j)) <= 0.0)
                            .unwrap_or(false);
                        if !on_obstacle && here == 0.0 {
                            Some(0.0)
                        } else {
                            None
                        }
                    }
                }
            };
            g[k] = match (side(-1), side(1)) {
                (Some(a), Some(b)) => (b - a) / (2.0 * h),
                (Some(a), None) => (here - a) / h,
                (None, Some(b)) => (b - here) / h,
                (None, None) => 0.0,
            };
        }
        out[idx] = g;
    }
    out
}

/// `∫_Omega F^p(-grad u) dx` by midpoint quadrature.
///
/// The gauge is not even, and its defining role is to weigh the *outward*
/// co-normal of super-level sets, which for a function is `-grad u`.
/// With this orientation the co-area formula turns the energy of a
/// decreasing radial field into the anisotropic perimeter of its level
/// caps, and radial profiles in the dual coordinate have energy density
/// exactly `|w'|^p`.
pub fn gradient_energy(
    grid: &MaskedGrid,
    u: &GridField,
    gauge: &GaugeDescriptor,
    p: f64,
) -> Result<f64> {
    if p < 1.0 {
        return Err(CapsymError::InvalidParameter(format!(
            "exponent p must be >= 1, got {p}"
        )));
    }
    let grads = cell_gradients(grid, u);
    let mut total = 0.0;
    for idx in grid.domain_cells() {
        let f = gauge.eval(-grads[idx], Some(grid.cell_center(idx)))?;
        total += f.powf(p);
    }
    Ok(total * grid.cell_measure())
}

fn nearest_domain_gradient(grid: &MaskedGrid, grads: &[VecN], x: VecN) -> VecN {
    let h = grid.spacing();
    let mut co = [0usize; 3];
    for k in 0..grid.dim() {
        let t = ((x[k] - grid.origin()[k]) / h - 0.5).round();
        co[k] = t.clamp(0.0, (grid.extents()[k] - 1) as f64) as usize;
    }
    let idx = grid.cell_index(co);
    if grid.class(idx).in_domain() {
        return grads[idx];
    }
    for nb in grid.face_neighbors(idx).into_iter().flatten() {
        if grid.class(nb).in_domain() {
            return grads[nb];
        }
    }
    VecN::zero(grid.dim())
}

/// Node interpolation of a cell field: mean over the adjacent in-domain
/// cells, zero where no domain cell touches the node.
fn node_interpolant(grid: &MaskedGrid, u: &GridField) -> Vec<f64> {
    let e = grid.node_extents();
    let mut out = vec![0.0; grid.num_nodes()];
    for kz in 0..e[2] {
        for j in 0..e[1] {
            for i in 0..e[0] {
                let mut sum = 0.0;
                let mut cnt = 0usize;
                let zr = if grid.dim() == 3 { 0..2 } else { 1..2 };
                for dz in zr {
                    for dy in 0..2usize {
                        for dx in 0..2usize {
                            let (ci, cj, ck) = (
                                i.checked_sub(1 - dx),
                                j.checked_sub(1 - dy),
                                if grid.dim() == 3 {
                                    kz.checked_sub(1 - dz)
                                } else {
                                    Some(0)
                                },
                            );
                            if let (Some(ci), Some(cj), Some(ck)) = (ci, cj, ck) {
                                if ci < grid.extents()[0]
                                    && cj < grid.extents()[1]
                                    && (grid.dim() == 2 || ck < grid.extents()[2])
                                {
                                    let idx = grid.cell_index([ci, cj, ck]);
                                    if grid.class(idx).in_domain() {
                                        sum += u.values[idx];
                                        cnt += 1;
                                    }
                                }
                            }
                        }
                    }
                }
                if cnt > 0 {
                    out[grid.node_index([i, j, kz])] = sum / cnt as f64;
                }
            }
        }
    }
    out
}

fn level_surface(grid: &MaskedGrid, nodes: &[f64], t: f64) -> LevelSet {
    let h = grid.spacing();
    let origin = grid.origin();
    let e = grid.node_extents();
    let nodes = nodes.to_vec();
    LevelSet::from_fn(grid, move |p| {
        let mut co = [0usize; 3];
        for k in 0..origin.dim() {
            let v = ((p[k] - origin[k]) / h).round();
            co[k] = v.clamp(0.0, (e[k] - 1) as f64) as usize;
        }
        t - nodes[co[0] + e[0] * (co[1] + e[1] * co[2])]
    })
}

/// Co-area self-consistency: at interior quantile levels, compare the
/// `t`-derivative of `A(t) = ∫_{u>t} F^p(grad u)` with the surface
/// integral `∫_{u=t} F^p(grad u)/|grad u|`, and `-mu'(t)` with
/// `∫_{u=t} 1/|grad u|` for both `u` and `u*`. The report carries the
/// median relative mismatch; degenerate levels are skipped and counted.
pub fn coarea_check(
    grid: &MaskedGrid,
    u: &GridField,
    gauge: &GaugeDescriptor,
    p: f64,
) -> Result<VerificationReport> {
    require_nonneg(grid, u)?;
    let grads = cell_gradients(grid, u);
    let nodes = node_interpolant(grid, u);
    let umax = u.max_on(grid);
    if umax <= 0.0 {
        return Ok(VerificationReport::equality("coarea", 0.0, 0.05)
            .with_meta("note", serde_json::json!("constant field, nothing to check")));
    }
    let nlev = 16usize;
    let ts: Vec<f64> = (1..nlev).map(|j| umax * j as f64 / nlev as f64).collect();
    let level_energy = |t: f64| -> Result<f64> {
        let mut a = 0.0;
        for idx in grid.domain_cells() {
            if u.values[idx] > t {
                a += gauge.eval(-grads[idx], Some(grid.cell_center(idx)))?.powf(p);
            }
        }
        Ok(a * grid.cell_measure())
    };
    let profile = distribution(grid, u, Some(&ts))?;
    let dt = umax / nlev as f64;
    let mut mismatches = Vec::new();
    let mut mu_mismatches = Vec::new();
    let mut skipped = 0usize;
    for (j, &t) in ts.iter().enumerate() {
        if j == 0 || j + 1 == ts.len() {
            continue;
        }
        let ls = level_surface(grid, &nodes, t);
        // the level surface {u = t} lives in the open domain: pieces on the
        // obstacle are artifacts of the zero extension and are dropped
        let pieces: Vec<_> = extract_surface(grid, &ls)
            .into_iter()
            .filter(|s| !s.contact)
            .collect();
        let surface_measure: f64 = pieces.iter().map(|s| s.area).sum();
        if surface_measure < grid.spacing() {
            skipped += 1;
            continue;
        }
        let mut surf = 0.0;
        let mut surf_inv = 0.0;
        let mut degenerate = false;
        for piece in &pieces {
            let g = nearest_domain_gradient(grid, &grads, piece.centroid);
            if g.norm() < 1e-10 {
                degenerate = true;
                break;
            }
            surf += gauge.eval(-g, Some(piece.centroid))?.powf(p) / g.norm() * piece.area;
            surf_inv += piece.area / g.norm();
        }
        if degenerate {
            skipped += 1;
            continue;
        }
        let da = -(level_energy(ts[j + 1])? - level_energy(ts[j - 1])?) / (2.0 * dt);
        let dmu = -(profile.measures[j + 1] - profile.measures[j - 1]) / (2.0 * dt);
        let scale = da.abs().max(surf).max(1e-12);
        mismatches.push((da - surf).abs() / scale);
        let mu_scale = dmu.abs().max(surf_inv).max(1e-12);
        mu_mismatches.push((dmu - surf_inv).abs() / mu_scale);
    }
    let median = |v: &mut Vec<f64>| -> f64 {
        if v.is_empty() {
            return 0.0;
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let mut mm = mismatches;
    let mut mum = mu_mismatches;
    let med = median(&mut mm).max(median(&mut mum));
    let allowed = (20.0 * grid.spacing()).max(0.02);
    Ok(VerificationReport::equality("coarea", med, allowed)
        .with_param("p", p)
        .with_param("h", grid.spacing())
        .with_meta("levels_skipped", serde_json::json!(skipped))
        .with_meta("levels_checked", serde_json::json!(mm.len())))
}

/// Symmetrization does not increase the gauge-gradient energy:
/// `∫ F̃^p(grad u) >= ∫ F_lambda^p(grad u*)` over the equal-volume cap.
/// The contact Neumann compatibility residual is recorded but does not
/// gate the check.
pub fn polya_szego_check(
    grid: &MaskedGrid,
    u: &GridField,
    lambda: f64,
    p: f64,
    drift: std::sync::Arc<dyn crate::gauge::DriftField>,
) -> Result<VerificationReport> {
    require_nonneg(grid, u)?;
    let dim = grid.dim();
    let gauge = GaugeDescriptor::obstacle(lambda, dim, drift)?;
    let lhs = gradient_energy(grid, u, &gauge, p)?;

    let profile = capillary_symmetrize(grid, u, lambda)?;
    let cap_grid = profile.cap_grid(grid.spacing())?;
    let star = profile.evaluate_on(&cap_grid);
    let cap_gauge = GaugeDescriptor::capillary_half_space(lambda, dim)?;
    let rhs = gradient_energy(&cap_grid, &star, &cap_gauge, p)?;

    // contact compatibility: DF̃(grad u) . nu on Neumann cells
    let grads = cell_gradients(grid, u);
    let mut resid = 0.0f64;
    let mut count = 0usize;
    for idx in grid.domain_cells() {
        if grid.class(idx) != CellClass::NeumannBoundary {
            continue;
        }
        let g = grads[idx];
        if g.norm() < 1e-12 {
            continue;
        }
        let center = grid.cell_center(idx);
        let nu = grid.obstacle().contact_normal(center);
        resid += gauge.grad(-g, Some(center))?.dot(&nu).abs();
        count += 1;
    }
    let neumann_residual = if count > 0 { resid / count as f64 } else { 0.0 };

    let tol = inequality_tol(grid.spacing(), lhs.max(rhs));
    Ok(VerificationReport::new("polya_szego", lhs, rhs, tol)
        .with_param("lambda", lambda)
        .with_param("p", p)
        .with_param("h", grid.spacing())
        .with_meta("neumann_residual", serde_json::json!(neumann_residual)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn disk_grid(h: f64) -> MaskedGrid {
        MaskedGrid::build(
            ConvexObstacle::far_away(2),
            &OuterShape::Ball {
                center: VecN::zero(2),
                radius: 1.0,
            },
            h,
        )
        .unwrap()
    }

    fn half_space_grid(h: f64) -> MaskedGrid {
        MaskedGrid::build(
            ConvexObstacle::lower_half_space(2),
            &OuterShape::Box {
                min: VecN::new(&[-1.5, 0.0]),
                max: VecN::new(&[1.5, 1.5]),
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn distribution_of_constant() {
        let g = half_space_grid(1.0 / 32.0);
        let u = GridField::from_fn(&g, |_| 2.0);
        let prof = distribution(&g, &u, Some(&[0.5, 1.9, 2.0, 2.5])).unwrap();
        assert_eq!(prof.measures[0], prof.total_volume);
        assert_eq!(prof.measures[1], prof.total_volume);
        assert_eq!(prof.measures[2], 0.0); // strict inequality at t = c
        assert_eq!(prof.measures[3], 0.0);
    }

    #[test]
    fn cone_distribution_matches_disk_areas() {
        let g = disk_grid(1.0 / 128.0);
        let u = GridField::from_fn(&g, |p| (1.0 - p.norm()).max(0.0));
        let prof = distribution(&g, &u, Some(&[0.0, 0.25, 0.5, 0.75])).unwrap();
        for (t, m) in prof.thresholds.iter().zip(&prof.measures) {
            let exact = PI * (1.0 - t) * (1.0 - t);
            assert!(
                (m - exact).abs() < 0.02 * PI,
                "t={t}: {m} vs {exact}"
            );
        }
    }

    #[test]
    fn distribution_jump_at_plateau() {
        let g = half_space_grid(1.0 / 32.0);
        let u = GridField::from_fn(&g, |p| if p[0] < 0.0 { 1.0 } else { 0.5 });
        let prof = distribution(&g, &u, Some(&[0.49, 0.51, 0.99, 1.01])).unwrap();
        let jump = prof.measures[0] - prof.measures[1];
        assert!((jump - prof.total_volume / 2.0).abs() < 0.1);
        assert!(prof.measures[3] == 0.0);
    }

    #[test]
    fn rearrangement_of_indicator() {
        let g = half_space_grid(1.0 / 32.0);
        let u = GridField::from_fn(&g, |p| if p.norm() < 0.5 { 1.0 } else { 0.0 });
        let m: f64 = g
            .domain_cells()
            .iter()
            .filter(|&&i| u.values[i] > 0.5)
            .count() as f64
            * g.cell_measure();
        let prof = decreasing_rearrangement(&g, &u).unwrap();
        assert_eq!(prof.eval_sharp(0.5 * m), 1.0);
        assert_eq!(prof.eval_sharp(m + 1e-9), 0.0);
    }

    #[test]
    fn cone_rearrangement_closed_form() {
        let g = disk_grid(1.0 / 128.0);
        let u = GridField::from_fn(&g, |p| (1.0 - p.norm()).max(0.0));
        let prof = decreasing_rearrangement(&g, &u).unwrap();
        for &s in &[0.1, 0.5, 1.0, 2.0] {
            let exact = 1.0 - (s / PI).sqrt();
            assert!(
                (prof.eval_sharp(s) - exact).abs() < 0.02,
                "s={s}: {} vs {exact}",
                prof.eval_sharp(s)
            );
        }
    }

    #[test]
    fn rearrangement_preserves_integral_exactly() {
        let g = half_space_grid(1.0 / 32.0);
        let u = GridField::from_fn(&g, |p| (p[0] + 2.0) * p[1]);
        let prof = decreasing_rearrangement(&g, &u).unwrap();
        let direct: f64 = g.domain_cells().iter().map(|&i| u.values[i]).sum::<f64>()
            * g.cell_measure();
        let from_profile: f64 =
            prof.values().iter().sum::<f64>() * g.cell_measure();
        assert!((direct - from_profile).abs() <= 1e-8 * direct.abs());
    }

    #[test]
    fn equimeasurability_of_lq_norms() {
        let g = half_space_grid(1.0 / 32.0);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u = random_bumps(&g, &mut rng);
        let prof = capillary_symmetrize(&g, &u, 0.5).unwrap();
        for &q in &[1.0, 2.0, 5.0, f64::INFINITY] {
            let a = u.lq_norm(&g, q);
            let b = prof.lq_norm(q);
            assert!(
                (a - b).abs() <= 1e-6 * a.max(1e-30),
                "q={q}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn rho_coordinate_reduces_to_radius_at_lambda_zero() {
        let x = VecN::new(&[0.3, 0.4]);
        assert!((rho_coordinate(x, 0.0) - 0.5).abs() < 1e-11);
    }

    #[test]
    fn rho_coordinate_inverts_cap_boundary() {
        let lambda = 0.5;
        for &(theta, rho) in &[(0.3f64, 0.7f64), (1.2, 2.0), (0.9, 0.1)] {
            // a point on the boundary of the cap of radius rho
            let x = VecN::new(&[
                rho * theta.sin(),
                rho * theta.cos() - rho * lambda,
            ]);
            if x.last() < 0.0 {
                continue;
            }
            let back = rho_coordinate(x, lambda);
            assert!((back - rho).abs() < 1e-9, "{back} vs {rho}");
        }
    }

    #[test]
    fn cap_shaped_field_is_a_fixed_point() {
        let lambda = 0.5;
        let g = half_space_grid(1.0 / 64.0);
        let u = GridField::from_fn(&g, |p| (1.0 - rho_coordinate(p, lambda)).max(0.0));
        let prof = capillary_symmetrize(&g, &u, lambda).unwrap();
        let mut max_err = 0.0f64;
        for idx in g.domain_cells() {
            let err = (prof.eval_at(g.cell_center(idx)) - u.values[idx]).abs();
            max_err = max_err.max(err);
        }
        assert!(max_err < 3.0 * g.spacing(), "max err {max_err}");
    }

    #[test]
    fn lambda_zero_symmetrization_is_radial() {
        let g = half_space_grid(1.0 / 32.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_bumps(&g, &mut rng);
        let prof = capillary_symmetrize(&g, &u, 0.0).unwrap();
        for &r in &[0.2, 0.5, 0.9] {
            let a = prof.eval_at(VecN::new(&[r, 0.001]));
            let b = prof.eval_at(VecN::new(&[0.0, r]));
            let c = prof.eval_at(VecN::new(&[r / 2.0f64.sqrt(), r / 2.0f64.sqrt()]));
            assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn indicator_maps_to_cap_indicator() {
        let g = half_space_grid(1.0 / 64.0);
        let u = GridField::from_fn(&g, |p| if p.norm() < 0.6 { 1.0 } else { 0.0 });
        let m: f64 = g
            .domain_cells()
            .iter()
            .filter(|&&i| u.values[i] > 0.5)
            .count() as f64
            * g.cell_measure();
        let lambda = 0.5;
        let prof = capillary_symmetrize(&g, &u, lambda).unwrap();
        // the support of u* is the cap of volume m
        let r_support = (m / prof.kappa).powf(0.5);
        for idx in g.domain_cells() {
            let p = g.cell_center(idx);
            let rho = rho_coordinate(p, lambda);
            let v = prof.eval_at(p);
            if rho < r_support - 2.0 * g.spacing() {
                assert_eq!(v, 1.0, "inside cap at rho={rho}");
            }
            if rho > r_support + 2.0 * g.spacing() {
                assert_eq!(v, 0.0, "outside cap at rho={rho}");
            }
        }
    }

    #[test]
    fn scaling_is_exact() {
        let g = half_space_grid(1.0 / 32.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_bumps(&g, &mut rng);
        let cu = GridField {
            values: u.values.iter().map(|v| 3.5 * v).collect(),
        };
        let pu = capillary_symmetrize(&g, &u, 0.4).unwrap();
        let pcu = capillary_symmetrize(&g, &cu, 0.4).unwrap();
        for (a, b) in pu.values().iter().zip(pcu.values()) {
            assert_eq!(*b, 3.5 * *a);
        }
    }

    #[test]
    fn rearrangement_is_monotone() {
        let g = half_space_grid(1.0 / 32.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_bumps(&g, &mut rng);
        let v = GridField {
            values: u
                .values
                .iter()
                .enumerate()
                .map(|(i, x)| x + 0.1 * ((i % 7) as f64) / 7.0 * x)
                .collect(),
        };
        let pu = decreasing_rearrangement(&g, &u).unwrap();
        let pv = decreasing_rearrangement(&g, &v).unwrap();
        for (a, b) in pu.values().iter().zip(pv.values()) {
            assert!(a <= b);
        }
    }

    #[test]
    fn symmetrization_is_idempotent() {
        let lambda = -0.3;
        let g = half_space_grid(1.0 / 64.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_bumps(&g, &mut rng);
        let p1 = capillary_symmetrize(&g, &u, lambda).unwrap();
        let star = p1.evaluate_on(&g);
        let p2 = capillary_symmetrize(&g, &star, lambda).unwrap();
        let mut max_err = 0.0f64;
        for &s in &[0.05, 0.2, 0.5, 1.0] {
            max_err = max_err.max((p1.eval_sharp(s) - p2.eval_sharp(s)).abs());
        }
        let scale = p1.lq_norm(f64::INFINITY);
        assert!(max_err < 0.1 * scale, "max err {max_err} (scale {scale})");
    }

    #[test]
    fn gradient_energy_of_linear_fields() {
        let g = MaskedGrid::build(
            ConvexObstacle::far_away(2),
            &OuterShape::Box {
                min: VecN::zero(2),
                max: VecN::new(&[1.0, 1.0]),
            },
            1.0 / 64.0,
        )
        .unwrap();
        let u = GridField::from_fn(&g, |p| p[0]);
        let vol = g.volume();
        let e2 = gradient_energy(&g, &u, &GaugeDescriptor::euclidean(2), 2.0).unwrap();
        assert!((e2 - vol).abs() < 1e-10, "{e2} vs {vol}");
        // F_lambda(e_1) = 1: the drift only sees the vertical component
        let gl = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        let e2l = gradient_energy(&g, &u, &gl, 2.0).unwrap();
        assert!((e2l - vol).abs() < 1e-10);
        let w = GridField::from_fn(&g, |p| p[1]);
        let e2w = gradient_energy(&g, &w, &gl, 2.0).unwrap();
        // -grad w = -e_2 and F(-e_2) = 1 + 0.5
        assert!((e2w - 2.25 * vol).abs() < 1e-10, "{e2w}");
        let z = GridField::zeros(&g);
        assert_eq!(gradient_energy(&g, &z, &gl, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn coarea_cone_on_disk() {
        let g = disk_grid(1.0 / 128.0);
        let u = GridField::from_fn(&g, |p| (1.0 - p.norm()).max(0.0));
        let report = coarea_check(&g, &u, &GaugeDescriptor::euclidean(2), 1.0).unwrap();
        assert!(report.passed, "{}", report.to_json_line());
        // mismatch (rhs slot of the equality encoding) should be small
        assert!(report.rhs < 0.05, "median mismatch {}", report.rhs);
    }

    #[test]
    fn coarea_cap_field() {
        let lambda = 0.5;
        let g = half_space_grid(1.0 / 64.0);
        let u = GridField::from_fn(&g, |p| (1.0 - rho_coordinate(p, lambda)).max(0.0));
        let gauge = GaugeDescriptor::capillary_half_space(lambda, 2).unwrap();
        let report = coarea_check(&g, &u, &gauge, 2.0).unwrap();
        assert!(report.passed, "{}", report.to_json_line());
    }

    #[test]
    fn polya_szego_cap_equality_and_random_margin() {
        let lambda = 0.5;
        let g = half_space_grid(1.0 / 64.0);
        let drift = std::sync::Arc::new(crate::harmonic::HalfSpaceDrift { lambda, dim: 2 });
        let u = GridField::from_fn_dirichlet(&g, |p| (1.0 - rho_coordinate(p, lambda)).max(0.0));
        let report = polya_szego_check(&g, &u, lambda, 2.0, drift.clone()).unwrap();
        assert!(report.passed, "{}", report.to_json_line());
        assert!(
            report.margin.abs() < 5.0 * report.tolerance,
            "cap should be near equality: {}",
            report.to_json_line()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let u = random_bumps_dirichlet(&g, &mut rng);
            let report = polya_szego_check(&g, &u, lambda, 2.0, drift.clone()).unwrap();
            assert!(report.passed, "{}", report.to_json_line());
        }
    }

    #[test]
    fn polya_szego_p1_matches_layer_cake_of_perimeters() {
        let lambda = 0.0;
        let g = half_space_grid(1.0 / 64.0);
        let u = GridField::from_fn_dirichlet(&g, |p| (1.0 - rho_coordinate(p, lambda)).max(0.0));
        let gauge = GaugeDescriptor::capillary_half_space(lambda, 2).unwrap();
        let e1 = gradient_energy(&g, &u, &gauge, 1.0).unwrap();
        // layer cake: integral over t of the capillary perimeter of {u > t};
        // for the unit cone over a cap these are caps of radius (1 - t)
        let layer: f64 = (0..200)
            .map(|j| {
                let t = (j as f64 + 0.5) / 200.0;
                crate::geometry::cap::cap_energy(lambda, 2, 1.0 - t).unwrap() / 200.0
            })
            .sum();
        assert!((e1 - layer).abs() < 0.02 * layer.max(1.0), "{e1} vs {layer}");
    }

    fn random_bumps(grid: &MaskedGrid, rng: &mut ChaCha8Rng) -> GridField {
        let centers: Vec<(VecN, f64, f64)> = (0..4)
            .map(|_| {
                (
                    VecN::new(&[rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.2)]),
                    rng.gen_range(0.3..1.0),
                    rng.gen_range(0.15..0.4),
                )
            })
            .collect();
        GridField::from_fn(grid, move |p| {
            centers
                .iter()
                .map(|(c, a, w)| a * (-(p - *c).dot(&(p - *c)) / (w * w)).exp())
                .sum()
        })
    }

    fn random_bumps_dirichlet(grid: &MaskedGrid, rng: &mut ChaCha8Rng) -> GridField {
        let mut u = random_bumps(grid, rng);
        for idx in grid.dirichlet_cells() {
            u.values[idx] = 0.0;
        }
        u
    }

    #[test]
    fn negative_field_is_rejected() {
        let g = half_space_grid(1.0 / 32.0);
        let u = GridField::from_fn(&g, |p| p[0]);
        assert!(capillary_symmetrize(&g, &u, 0.0).is_err());
        assert!(distribution(&g, &u, None).is_err());
    }
}
