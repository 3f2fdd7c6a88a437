//! Exponential-integrability functional and the concentrating sequence
//! used to probe criticality of the multiplier.

use crate::error::{CapsymError, Result};
use crate::gauge::GaugeDescriptor;
use crate::geometry::grid::{GridField, MaskedGrid};
use crate::rearrange::{gradient_energy, rho_coordinate};

use super::constants::MoserConstants;

/// `∫ exp(scale * lambda_tilde * u^{n/(n-1)})` over the domain, for a
/// non-negative field with unit gauge-gradient `n`-energy.
pub fn moser_functional(
    grid: &MaskedGrid,
    u: &GridField,
    constants: &MoserConstants,
    scale: f64,
) -> Result<f64> {
    let n = constants.n as f64;
    let gauge = GaugeDescriptor::capillary_half_space(constants.lambda, constants.n)?;
    let energy = gradient_energy(grid, u, &gauge, n)?;
    if energy > 1.0 + 1e-10 {
        return Err(CapsymError::InvalidParameter(format!(
            "gradient n-energy exceeds the unit constraint by {:.3e}",
            energy - 1.0
        )));
    }
    for &idx in &grid.domain_cells() {
        if u.values[idx] < 0.0 {
            return Err(CapsymError::InvalidParameter(
                "exponential functional needs a non-negative field".into(),
            ));
        }
    }
    let expo = n / (n - 1.0);
    let mut total = 0.0;
    for idx in grid.domain_cells() {
        total += (scale * constants.lambda_tilde * u.values[idx].powf(expo)).exp();
    }
    Ok(total * grid.cell_measure())
}

/// The `k`-th member of the concentrating truncated-logarithm family in
/// the dual-gauge coordinate, renormalized so that the discrete gradient
/// `n`-energy is exactly one.
pub fn moser_sequence(
    k: usize,
    lambda: f64,
    n: usize,
    grid: &MaskedGrid,
) -> Result<GridField> {
    if k < 1 {
        return Err(CapsymError::InvalidParameter(
            "sequence index starts at 1".into(),
        ));
    }
    let h = grid.spacing();
    if k as f64 > 1.0 / (4.0 * h) {
        return Err(CapsymError::UnderResolved(format!(
            "concentration scale 1/{k} below 4h = {}",
            4.0 * h
        )));
    }
    let log_k = (k as f64).ln().max(1e-12);
    let raw = GridField::from_fn(grid, |x| {
        let rho = rho_coordinate(x, lambda).max(1e-300);
        (1.0 / rho).ln().clamp(0.0, log_k)
    });
    let gauge = GaugeDescriptor::capillary_half_space(lambda, n)?;
    let energy = gradient_energy(grid, &raw, &gauge, n as f64)?;
    if energy <= 0.0 {
        return Err(CapsymError::UnderResolved(
            "truncated-log profile vanished on this grid".into(),
        ));
    }
    let c = energy.powf(-1.0 / n as f64);
    Ok(GridField {
        values: raw.values.iter().map(|v| c * v).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::obstacle::{ConvexObstacle, OuterShape};
    use crate::vecn::VecN;
    use crate::verify::constants::MoserConvention;

    fn half_disk(h: f64) -> MaskedGrid {
        MaskedGrid::build(
            ConvexObstacle::lower_half_space(2),
            &OuterShape::Ball {
                center: VecN::zero(2),
                radius: 1.0,
            },
            h,
        )
        .unwrap()
    }

    #[test]
    fn zero_field_gives_the_volume() {
        let g = half_disk(1.0 / 32.0);
        let c = MoserConstants::new(0.0, 2, MoserConvention::Proposition).unwrap();
        let v = moser_functional(&g, &GridField::zeros(&g), &c, 1.0).unwrap();
        assert!((v - g.volume()).abs() < 1e-12 * g.volume());
    }

    #[test]
    fn energy_constraint_is_enforced() {
        let g = half_disk(1.0 / 32.0);
        let c = MoserConstants::new(0.0, 2, MoserConvention::Proposition).unwrap();
        let u = GridField::from_fn_dirichlet(&g, |x| 10.0 * (1.0 - x.norm()));
        assert!(matches!(
            moser_functional(&g, &u, &c, 1.0),
            Err(CapsymError::InvalidParameter(_))
        ));
    }

    #[test]
    fn sequence_is_normalized_and_grows_like_log() {
        let g = half_disk(1.0 / 64.0);
        let gauge = GaugeDescriptor::capillary_half_space(0.0, 2).unwrap();
        let mut sups = Vec::new();
        for &k in &[2usize, 4, 8, 16] {
            let m = moser_sequence(k, 0.0, 2, &g).unwrap();
            let e = gradient_energy(&g, &m, &gauge, 2.0).unwrap();
            assert!((e - 1.0).abs() < 1e-6, "energy {e} at k={k}");
            sups.push(m.max_on(&g));
        }
        // sup m_k ~ (log k)^{1/2}: ratios between consecutive k should
        // exceed one and shrink
        for w in sups.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn too_concentrated_for_the_grid_errors() {
        let g = half_disk(1.0 / 16.0);
        assert!(matches!(
            moser_sequence(64, 0.0, 2, &g),
            Err(CapsymError::UnderResolved(_))
        ));
    }

    #[test]
    fn functional_monotone_in_scale() {
        let g = half_disk(1.0 / 32.0);
        let c = MoserConstants::new(0.0, 2, MoserConvention::Proposition).unwrap();
        let m = moser_sequence(4, 0.0, 2, &g).unwrap();
        let mut last = 0.0;
        for &s in &[0.5, 0.8, 1.0, 1.1] {
            let v = moser_functional(&g, &m, &c, s).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn supercritical_scale_concentrates() {
        // at scale 1 the functional stays bounded along the sequence; at
        // scale 1.1 it keeps growing with k
        let g = half_disk(1.0 / 128.0);
        let c = MoserConstants::new(0.0, 2, MoserConvention::Proposition).unwrap();
        let mut at_one = Vec::new();
        let mut at_sup = Vec::new();
        for &k in &[4usize, 8, 16, 32] {
            let m = moser_sequence(k, 0.0, 2, &g).unwrap();
            at_one.push(moser_functional(&g, &m, &c, 1.0).unwrap());
            at_sup.push(moser_functional(&g, &m, &c, 1.1).unwrap());
        }
        let lo = at_one.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = at_one.iter().cloned().fold(0.0f64, f64::max);
        assert!(hi / lo < 1.5, "critical-scale values spread: {at_one:?}");
        for w in at_sup.windows(2) {
            assert!(w[1] > w[0] * 1.05, "supercritical not growing: {at_sup:?}");
        }
    }
}
