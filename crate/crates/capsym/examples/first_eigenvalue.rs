//! First mixed-boundary eigenvalue experiments: the half-disk against
//! the squared first Bessel zero, and equal-volume comparisons showing
//! that the spherical cap minimizes the eigenvalue.

use capsym::gauge::GaugeDescriptor;
use capsym::geometry::grid::MaskedGrid;
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::pde::eigen::first_eigenvalue;
use capsym::verify::compare::{bossel_daners_compare, cap_comparison_grid};
use capsym::vecn::VecN;

fn main() {
    let h = 1.0 / 128.0;
    let grid = MaskedGrid::build(
        ConvexObstacle::lower_half_space(2),
        &OuterShape::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        },
        h,
    )
    .unwrap();
    let gauge = GaugeDescriptor::capillary_half_space(0.0, 2).unwrap();
    let res = first_eigenvalue(&grid, &gauge, h).unwrap();
    let bessel_sq = 5.783_185_962_946_785;
    println!("half-disk, lambda = 0, h = {h}");
    println!(
        "eigenvalue {:.6} vs j_0,1^2 = {bessel_sq:.6} (rel {:.2e}), {} iterations",
        res.eigenvalue,
        (res.eigenvalue - bessel_sq).abs() / bessel_sq,
        res.iterations
    );

    println!("\n-- slab vs equal-volume cap, lambda = 0");
    let slab = OuterShape::Box {
        min: VecN::new(&[-1.5, 0.0]),
        max: VecN::new(&[1.5, 0.25]),
    };
    let sg = MaskedGrid::build(ConvexObstacle::lower_half_space(2), &slab, 1.0 / 32.0).unwrap();
    let rep = bossel_daners_compare(&sg, 0.0, &gauge).unwrap();
    println!("{}", rep.to_json_line());

    println!("\n-- cap self-comparison, lambda = 0.4 (tight)");
    let lambda = 0.4;
    let capg = cap_comparison_grid(lambda, 2, 1.0, 1.0 / 32.0).unwrap();
    let cg = GaugeDescriptor::capillary_half_space(lambda, 2).unwrap();
    let rep = bossel_daners_compare(&capg, lambda, &cg).unwrap();
    println!("{}", rep.to_json_line());
}
