//! Drive the exponential-integral functional along a concentrating
//! sequence with unit gradient energy: bounded at the critical scale,
//! blowing up just above it.

use capsym::geometry::grid::MaskedGrid;
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::vecn::VecN;
use capsym::verify::constants::{MoserConstants, MoserConvention};
use capsym::verify::moser::{moser_functional, moser_sequence};

fn main() {
    let consts = MoserConstants::new(0.0, 2, MoserConvention::Proposition).unwrap();
    println!(
        "n = 2, lambda = 0: kappa_tilde = {:.10}, lambda_tilde = {:.10} (2 pi = {:.10})",
        consts.kappa_tilde,
        consts.lambda_tilde,
        2.0 * std::f64::consts::PI
    );

    let grid = MaskedGrid::build(
        ConvexObstacle::lower_half_space(2),
        &OuterShape::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        },
        1.0 / 128.0,
    )
    .unwrap();

    println!("\n   k   functional@1.0   functional@1.1");
    for &k in &[2usize, 4, 8, 16, 32] {
        let m = moser_sequence(k, 0.0, 2, &grid).unwrap();
        let critical = moser_functional(&grid, &m, &consts, 1.0).unwrap();
        let supercritical = moser_functional(&grid, &m, &consts, 1.1).unwrap();
        println!("{k:>4}   {critical:>14.6}   {supercritical:>14.6}");
    }
    println!("\nscale 1.0 plateaus; scale 1.1 grows without bound in k.");
}
