//! Gauges, dual gauges and Wulff-ball quantities.
//!
//! A gauge is a positively one-homogeneous convex function `F` on `R^n`.
//! Three kinds are supported:
//!
//! * Euclidean: `F(xi) = |xi|`,
//! * capillary half-space: `F_lambda(xi) = |xi| - lambda <xi, e_n>`,
//! * obstacle: `F(xi) = |xi| + grad_h(at) . xi` with a position-dependent
//!   drift field `grad_h` coming from a harmonic potential.
//!
//! The dual gauge is `F^o(x) = sup <x, xi> / F(xi)`; its unit ball is the
//! Wulff ball. For all three kinds the Wulff ball at a frozen drift `g` is
//! the translated Euclidean ball `B_1(g)`, which gives the closed form of
//! the dual evaluated here.

use std::sync::Arc;

use crate::error::{CapsymError, Result};
use crate::quad::adaptive_simpson;
use crate::vecn::VecN;

/// Position-dependent drift `grad h` entering the obstacle gauge.
pub trait DriftField: Send + Sync {
    /// The drift vector at a point of the domain.
    fn grad(&self, at: VecN) -> VecN;

    /// Supremum of `|grad h|` over the domain. Must be `< 1`.
    fn sup_norm(&self) -> f64;
}

/// Constant drift, used for testing and for the half-space case.
pub struct ConstantDrift(pub VecN);

impl DriftField for ConstantDrift {
    fn grad(&self, _at: VecN) -> VecN {
        self.0
    }
    fn sup_norm(&self) -> f64 {
        self.0.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeKind {
    Euclidean,
    CapillaryHalfSpace,
    Obstacle,
}

/// A gauge descriptor: kind, contact parameter and (for the obstacle kind)
/// the drift field. Immutable after construction; safe to share across
/// threads.
#[derive(Clone)]
pub struct GaugeDescriptor {
    kind: GaugeKind,
    lambda: f64,
    dim: usize,
    drift: Option<Arc<dyn DriftField>>,
}

/// Result of a dual-gauge evaluation.
#[derive(Debug, Clone, Copy)]
pub struct DualEvaluation {
    pub value: f64,
    pub at_point: VecN,
    pub drift_used: VecN,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda.abs() < 1.0) {
        return Err(CapsymError::InvalidParameter(format!(
            "lambda must lie strictly inside (-1,1), got {lambda}"
        )));
    }
    Ok(())
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=3).contains(&dim) {
        return Err(CapsymError::InvalidParameter(format!(
            "dimension must be 2 or 3, got {dim}"
        )));
    }
    Ok(())
}

impl GaugeDescriptor {
    pub fn euclidean(dim: usize) -> Self {
        check_dim(dim).expect("dimension must be 2 or 3");
        GaugeDescriptor {
            kind: GaugeKind::Euclidean,
            lambda: 0.0,
            dim,
            drift: None,
        }
    }

    pub fn capillary_half_space(lambda: f64, dim: usize) -> Result<Self> {
        check_lambda(lambda)?;
        check_dim(dim)?;
        Ok(GaugeDescriptor {
            kind: GaugeKind::CapillaryHalfSpace,
            lambda,
            dim,
            drift: None,
        })
    }

    pub fn obstacle(lambda: f64, dim: usize, drift: Arc<dyn DriftField>) -> Result<Self> {
        check_lambda(lambda)?;
        check_dim(dim)?;
        let sup = drift.sup_norm();
        if sup >= 1.0 {
            return Err(CapsymError::DriftTooLarge(sup));
        }
        Ok(GaugeDescriptor {
            kind: GaugeKind::Obstacle,
            lambda,
            dim,
            drift: Some(drift),
        })
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The drift vector entering the gauge at `at`. Zero for the Euclidean
    /// gauge, `-lambda e_n` for the half-space gauge.
    pub fn drift_at(&self, at: Option<VecN>) -> Result<VecN> {
        match self.kind {
            GaugeKind::Euclidean => Ok(VecN::zero(self.dim)),
            GaugeKind::CapillaryHalfSpace => Ok(VecN::e_last(self.dim) * (-self.lambda)),
            GaugeKind::Obstacle => {
                let drift = self.drift.as_ref().ok_or(CapsymError::MissingDrift)?;
                let at = at.ok_or_else(|| {
                    CapsymError::InvalidParameter(
                        "obstacle gauge needs an evaluation point for the drift".into(),
                    )
                })?;
                let g = drift.grad(at);
                let norm = g.norm();
                if norm >= 1.0 {
                    return Err(CapsymError::DriftTooLarge(norm));
                }
                Ok(g)
            }
        }
    }

    /// `F(xi)` at the (optional) spatial point `at`.
    pub fn eval(&self, xi: VecN, at: Option<VecN>) -> Result<f64> {
        debug_assert!(xi.is_finite());
        let g = self.drift_at(at)?;
        Ok(xi.norm() + g.dot(&xi))
    }

    /// `DF(xi)`, undefined at the origin.
    pub fn grad(&self, xi: VecN, at: Option<VecN>) -> Result<VecN> {
        if xi.norm() == 0.0 {
            return Err(CapsymError::InvalidParameter(
                "gauge is not differentiable at xi = 0".into(),
            ));
        }
        let g = self.drift_at(at)?;
        Ok(xi.normalized() + g)
    }

    /// The dual gauge `F^o(x)` with the drift frozen at `at`.
    ///
    /// `F^o(x) = |x|^2 / ( sqrt(<x,g>^2 + |x|^2 (1 - |g|^2)) + <x,g> )`.
    pub fn dual(&self, x: VecN, at: Option<VecN>) -> Result<DualEvaluation> {
        let g = self.drift_at(at)?;
        let n2 = x.dot(&x);
        let value = if n2 == 0.0 {
            0.0
        } else {
            let xg = x.dot(&g);
            n2 / ((xg * xg + n2 * (1.0 - g.dot(&g))).sqrt() + xg)
        };
        Ok(DualEvaluation {
            value,
            at_point: x,
            drift_used: g,
        })
    }

    /// `DF^o(x)` by central finite differences of the dual.
    pub fn dual_grad(&self, x: VecN, at: Option<VecN>) -> Result<VecN> {
        let step = 1e-6 * x.norm().max(1e-12);
        let mut out = VecN::zero(self.dim);
        for k in 0..self.dim {
            let e = VecN::axis(self.dim, k) * step;
            let plus = self.dual(x + e, at)?.value;
            let minus = self.dual(x - e, at)?.value;
            out[k] = (plus - minus) / (2.0 * step);
        }
        Ok(out)
    }

    /// Verify the polarity identities
    /// `F(DF^o(x)) = 1`, `DF(x).x = F(x)` and `F^o(x) DF(DF^o(x)) = x`
    /// on the given samples. Returns the maximum absolute residual.
    pub fn check_polarity(&self, samples: &[VecN], at: Option<VecN>) -> Result<PolarityReport> {
        let mut report = PolarityReport::default();
        for &x in samples {
            if x.norm() == 0.0 {
                return Err(CapsymError::InvalidParameter(
                    "polarity samples must be nonzero".into(),
                ));
            }
            let dual = self.dual(x, at)?;
            let dgrad = self.dual_grad(x, at)?;
            let r1 = (self.eval(dgrad, at)? - 1.0).abs();
            let r2 = (self.grad(x, at)?.dot(&x) - self.eval(x, at)?).abs();
            let back = self.grad(dgrad, at)? * dual.value;
            let r3 = (back - x).norm();
            report.unit_wulff_normal = report.unit_wulff_normal.max(r1);
            report.euler_identity = report.euler_identity.max(r2);
            report.involution = report.involution.max(r3);
        }
        Ok(report)
    }

    /// Lebesgue measure of the unit Wulff ball `{F^o <= 1}` with the drift
    /// frozen at `at`, by adaptive quadrature over the radial function of
    /// the dual unit ball.
    pub fn wulff_ball_volume(&self, at: Option<VecN>) -> Result<f64> {
        let g = self.drift_at(at)?;
        let gg = g.dot(&g);
        if gg >= 1.0 {
            return Err(CapsymError::DriftTooLarge(gg.sqrt()));
        }
        // radial function of the Wulff ball B_1(g): rho(w) =
        // sqrt(<w,g>^2 + 1 - |g|^2) + <w,g> for unit w
        let radial = |w: VecN| -> f64 {
            let wg = w.dot(&g);
            (wg * wg + 1.0 - gg).sqrt() + wg
        };
        let n = self.dim;
        let vol = match n {
            2 => {
                let f = |theta: f64| {
                    let w = VecN::new(&[theta.cos(), theta.sin()]);
                    radial(w).powi(2)
                };
                0.5 * adaptive_simpson(&f, 0.0, 2.0 * std::f64::consts::PI, 1e-10)
            }
            3 => {
                let f = |theta: f64| {
                    let inner = |phi: f64| {
                        let w = VecN::new(&[
                            theta.sin() * phi.cos(),
                            theta.sin() * phi.sin(),
                            theta.cos(),
                        ]);
                        radial(w).powi(3)
                    };
                    theta.sin() * adaptive_simpson(&inner, 0.0, 2.0 * std::f64::consts::PI, 1e-10)
                };
                adaptive_simpson(&f, 0.0, std::f64::consts::PI, 1e-9) / 3.0
            }
            _ => unreachable!("dimension checked at construction"),
        };
        Ok(vol)
    }
}

/// Maximum residuals of the three polarity identities over a sample set.
#[derive(Debug, Default, Clone, Copy)]
pub struct PolarityReport {
    /// `|F(DF^o(x)) - 1|`
    pub unit_wulff_normal: f64,
    /// `|DF(x).x - F(x)|`
    pub euler_identity: f64,
    /// `|F^o(x) DF(DF^o(x)) - x|`
    pub involution: f64,
}

impl PolarityReport {
    pub fn max_residual(&self) -> f64 {
        self.unit_wulff_normal
            .max(self.euler_identity)
            .max(self.involution)
    }
}

/// Brute-force polar transform `sup <x, xi> / F(xi)` over sampled unit
/// directions. Test oracle for the closed-form dual.
pub fn polar_sup(gauge: &GaugeDescriptor, x: VecN, at: Option<VecN>, samples: usize) -> f64 {
    let n = gauge.dim();
    let mut best = 0.0f64;
    // deterministic low-discrepancy-ish sweep over directions
    match n {
        2 => {
            for i in 0..samples {
                let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / samples as f64;
                let xi = VecN::new(&[theta.cos(), theta.sin()]);
                let f = gauge.eval(xi, at).expect("unit sample");
                best = best.max(x.dot(&xi) / f);
            }
        }
        3 => {
            // Fibonacci sphere
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for i in 0..samples {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / samples as f64;
                let r = (1.0 - z * z).sqrt();
                let theta = golden * i as f64;
                let xi = VecN::new(&[r * theta.cos(), r * theta.sin(), z]);
                let f = gauge.eval(xi, at).expect("unit sample");
                best = best.max(x.dot(&xi) / f);
            }
        }
        _ => unreachable!(),
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_vec(rng: &mut impl Rng, dim: usize) -> VecN {
        loop {
            let mut v = VecN::zero(dim);
            for k in 0..dim {
                v[k] = rng.gen_range(-1.0..1.0);
            }
            if v.norm() > 1e-3 {
                return v;
            }
        }
    }

    #[test]
    fn eval_half_space_vertical() {
        let g = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        let v = g.eval(VecN::new(&[0.0, 1.0]), None).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn eval_euclidean() {
        let g = GaugeDescriptor::euclidean(2);
        assert_eq!(g.eval(VecN::new(&[3.0, 4.0]), None).unwrap(), 5.0);
    }

    #[test]
    fn obstacle_with_half_space_drift_matches_half_space_gauge() {
        // Remark 2.2: with h = -lambda x_n the obstacle gauge is F_lambda.
        let lambda = 0.7;
        let drift = Arc::new(ConstantDrift(VecN::e_last(2) * (-lambda)));
        let go = GaugeDescriptor::obstacle(lambda, 2, drift).unwrap();
        let gh = GaugeDescriptor::capillary_half_space(lambda, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let at = Some(VecN::zero(2));
        for _ in 0..100 {
            let xi = rand_vec(&mut rng, 2);
            let a = go.eval(xi, at).unwrap();
            let b = gh.eval(xi, None).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(GaugeDescriptor::capillary_half_space(1.0, 2).is_err());
        assert!(GaugeDescriptor::capillary_half_space(-1.2, 3).is_err());
    }

    #[test]
    fn grad_half_space() {
        let g = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        let d = g.grad(VecN::new(&[1.0, 0.0]), None).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15);
        assert!((d[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn grad_euclidean() {
        let g = GaugeDescriptor::euclidean(2);
        let d = g.grad(VecN::new(&[0.0, 2.0]), None).unwrap();
        assert_eq!(d.comps(), &[0.0, 1.0]);
    }

    #[test]
    fn grad_rejects_zero() {
        let g = GaugeDescriptor::euclidean(2);
        assert!(g.grad(VecN::zero(2), None).is_err());
    }

    #[test]
    fn euler_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &lambda in &[-0.5, 0.0, 0.5] {
            for dim in [2, 3] {
                let g = GaugeDescriptor::capillary_half_space(lambda, dim).unwrap();
                for _ in 0..50 {
                    let xi = rand_vec(&mut rng, dim);
                    let lhs = g.grad(xi, None).unwrap().dot(&xi);
                    let rhs = g.eval(xi, None).unwrap();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dual_collapses_to_norm_at_lambda_zero() {
        let g = GaugeDescriptor::capillary_half_space(0.0, 2).unwrap();
        let x = VecN::new(&[0.3, -0.4]);
        let d = g.dual(x, None).unwrap();
        assert!((d.value - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dual_vertical_is_two_at_half_lambda() {
        // The unit Wulff ball of F_{1/2} is B_1(-e_n/2); e_n leaves it at t = 2.
        let g = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        let d = g.dual(VecN::e_last(2), None).unwrap();
        assert!((d.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dual_matches_brute_force_polarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        for _ in 0..20 {
            let x = rand_vec(&mut rng, 2);
            let closed = g.dual(x, None).unwrap().value;
            let brute = polar_sup(&g, x, None, 100_000);
            assert!(
                (closed - brute).abs() < 1e-4 * closed.max(1.0),
                "closed={closed} brute={brute}"
            );
        }
    }

    #[test]
    fn polarity_residuals_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = GaugeDescriptor::capillary_half_space(0.7, 2).unwrap();
        let samples: Vec<VecN> = (0..1000).map(|_| rand_vec(&mut rng, 2)).collect();
        let report = g.check_polarity(&samples, None).unwrap();
        assert!(report.max_residual() < 1e-8, "{report:?}");
    }

    #[test]
    fn polarity_obstacle_with_frozen_drift() {
        let drift = Arc::new(ConstantDrift(VecN::new(&[0.2, -0.3])));
        let g = GaugeDescriptor::obstacle(0.5, 2, drift).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<VecN> = (0..200).map(|_| rand_vec(&mut rng, 2)).collect();
        let at = Some(VecN::new(&[1.0, 1.0]));
        let report = g.check_polarity(&samples, at).unwrap();
        assert!(report.max_residual() < 1e-8, "{report:?}");
    }

    #[test]
    fn wulff_volume_is_translated_unit_ball() {
        let g0 = GaugeDescriptor::capillary_half_space(0.0, 2).unwrap();
        assert!((g0.wulff_ball_volume(None).unwrap() - std::f64::consts::PI).abs() < 1e-8);
        let g1 = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        assert!((g1.wulff_ball_volume(None).unwrap() - std::f64::consts::PI).abs() < 1e-6);
        let g2 = GaugeDescriptor::capillary_half_space(0.5, 3).unwrap();
        let v3 = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((g2.wulff_ball_volume(None).unwrap() - v3).abs() < 1e-6);
    }

    #[test]
    fn gauge_is_not_reversible_for_nonzero_lambda() {
        let g = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
        let en = VecN::e_last(2);
        let plus = g.eval(en, None).unwrap();
        let minus = g.eval(-en, None).unwrap();
        assert!((plus - minus).abs() > 0.9);
    }

    #[test]
    fn homogeneity_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lambda = 0.6;
        let g = GaugeDescriptor::capillary_half_space(lambda, 3).unwrap();
        for _ in 0..200 {
            let xi = rand_vec(&mut rng, 3);
            let t: f64 = rng.gen_range(1e-3..5.0);
            let f = g.eval(xi, None).unwrap();
            let ft = g.eval(xi * t, None).unwrap();
            assert!((ft - t * f).abs() <= 1e-12 * (t * f).max(1.0));
            // only positive homogeneity: negative scalings see the reversed gauge
            let fr = g.eval(-xi, None).unwrap();
            let frt = g.eval(xi * (-t), None).unwrap();
            assert!((frt - t * fr).abs() <= 1e-12 * (t * fr).max(1.0));
            assert!(f >= (1.0 - lambda.abs()) * xi.norm() - 1e-14);
            assert!(f <= (1.0 + lambda.abs()) * xi.norm() + 1e-14);
        }
    }

    #[test]
    fn triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = GaugeDescriptor::capillary_half_space(-0.4, 2).unwrap();
        for _ in 0..200 {
            let a = rand_vec(&mut rng, 2);
            let b = rand_vec(&mut rng, 2);
            let sum = g.eval(a + b, None).unwrap();
            assert!(sum <= g.eval(a, None).unwrap() + g.eval(b, None).unwrap() + 1e-12);
        }
    }

    #[test]
    fn duality_involution_via_brute_force() {
        // applying the brute-force polar transform twice returns F
        let g = GaugeDescriptor::capillary_half_space(0.3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let xi = rand_vec(&mut rng, 2);
            // F^{oo}(xi) = sup <xi, y> / F^o(y)
            let mut best = 0.0f64;
            for i in 0..20_000 {
                let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 20_000.0;
                let y = VecN::new(&[theta.cos(), theta.sin()]);
                best = best.max(xi.dot(&y) / g.dual(y, None).unwrap().value);
            }
            let f = g.eval(xi, None).unwrap();
            assert!((best - f).abs() < 1e-4 * f.max(1.0));
        }
    }
}
