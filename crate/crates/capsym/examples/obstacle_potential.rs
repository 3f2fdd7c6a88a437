//! Solve the drift potential around a ball obstacle, compare it with the
//! closed-form exterior potential, and close the contact/outer flux
//! balance.

use std::sync::Arc;

use capsym::geometry::grid::MaskedGrid;
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::harmonic::{flux_identity_check, solve_h, BallDrift, OuterBc};
use capsym::vecn::VecN;

fn main() {
    let lambda = 0.4;
    let h = 1.0 / 32.0;
    let grid = MaskedGrid::build(
        ConvexObstacle::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        },
        &OuterShape::Box {
            min: VecN::new(&[-2.5, -2.5]),
            max: VecN::new(&[2.5, 2.5]),
        },
        h,
    )
    .unwrap();
    let drift = BallDrift {
        lambda,
        radius: 1.0,
        center: VecN::zero(2),
    };
    let field = solve_h(
        &grid,
        lambda,
        &OuterBc::MatchAnalytic(Arc::new(move |p| drift.potential(p))),
    )
    .unwrap();

    let exact = BallDrift {
        lambda,
        radius: 1.0,
        center: VecN::zero(2),
    };
    let mut sup = 0.0f64;
    let mut far = 0.0f64;
    for idx in grid.domain_cells() {
        let x = grid.cell_center(idx);
        let e = (field.values.values[idx] - exact.potential(x)).abs();
        sup = sup.max(e);
        if x.norm() > 1.3 {
            far = far.max(e);
        }
    }
    println!("grid: {} domain cells at h = {h}", grid.domain_cells().len());
    println!("CG iterations: {}", field.iterations);
    println!("sup |h - h_exact|            = {sup:.3e}");
    println!("sup away from the staircase  = {far:.3e}");
    println!("net contact flux             = {:.6}", field.contact_flux);
    println!("flux identity residual       = {:.3e}", flux_identity_check(&field));

    println!("\npotential along the diagonal:");
    for &r in &[1.2, 1.5, 2.0] {
        let x = VecN::new(&[r / 2f64.sqrt(), r / 2f64.sqrt()]);
        let mut probe = VecN::zero(2);
        probe[0] = x[0];
        probe[1] = x[1];
        let idx = grid
            .domain_cells()
            .into_iter()
            .min_by(|&a, &b| {
                let da = (grid.cell_center(a) - probe).norm();
                let db = (grid.cell_center(b) - probe).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        println!(
            "  |x| = {r:.1}:  solved {:+.6}  exact {:+.6}",
            field.values.values[idx],
            exact.potential(grid.cell_center(idx))
        );
    }
}
