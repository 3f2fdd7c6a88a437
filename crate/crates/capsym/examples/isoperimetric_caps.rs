//! Measure capillary perimeters of sets sitting on the half-space
//! obstacle and check the isoperimetric inequality: spherical caps are
//! (near-)equality cases, everything else has a strict margin.

use capsym::geometry::cap::{cap_energy, cap_free_area, cap_wet_area};
use capsym::geometry::grid::MaskedGrid;
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::geometry::perimeter::{capillary_perimeter, isoperimetric_check};
use capsym::geometry::surface::LevelSet;
use capsym::vecn::VecN;

fn main() {
    let h = 1.0 / 64.0;
    let grid = MaskedGrid::build(
        ConvexObstacle::lower_half_space(2),
        &OuterShape::Box {
            min: VecN::new(&[-2.0, 0.0]),
            max: VecN::new(&[2.0, 2.0]),
        },
        h,
    )
    .unwrap();

    let lambda = 0.5;
    println!("-- spherical cap, lambda = {lambda}");
    let cap = LevelSet::capillary(&grid, move |p| {
        (p + VecN::new(&[0.0, lambda])).norm() - 1.0
    });
    let per = capillary_perimeter(&grid, &cap, lambda).unwrap();
    println!(
        "free {:.5} (exact {:.5})   wet {:.5} (exact {:.5})",
        per.free,
        cap_free_area(lambda, 2, 1.0).unwrap(),
        per.wet,
        cap_wet_area(lambda, 2, 1.0).unwrap()
    );
    println!(
        "energy {:.5} (exact {:.5})   volume {:.5}",
        per.energy,
        cap_energy(lambda, 2, 1.0).unwrap(),
        per.volume
    );
    let rep = isoperimetric_check(&grid, &cap, lambda).unwrap();
    println!("{}", rep.to_json_line());

    println!("\n-- square of the same height, lambda = 0");
    let square = LevelSet::capillary(&grid, |p| p[0].abs().max((p[1] - 0.5).abs()) - 0.5);
    let rep = isoperimetric_check(&grid, &square, 0.0).unwrap();
    println!("{}", rep.to_json_line());
    println!(
        "margin / tolerance = {:.1} (strictly suboptimal)",
        rep.margin / rep.tolerance
    );
}
