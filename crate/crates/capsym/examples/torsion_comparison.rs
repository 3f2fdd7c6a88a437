//! Solve the mixed torsion problem (unit source, Dirichlet outer rim,
//! natural condition on the obstacle), rearrange the solution, and
//! compare it with the radial solution of the symmetrized problem. On
//! the cap the two coincide; on an L-shaped domain a strict gap opens.

use capsym::gauge::GaugeDescriptor;
use capsym::geometry::grid::{GridField, MaskedGrid};
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::verify::compare::talenti_compare;
use capsym::vecn::VecN;

fn main() {
    let h = 1.0 / 48.0;

    println!("-- half-disk (the equality case), lambda = 0");
    let half_disk = MaskedGrid::build(
        ConvexObstacle::lower_half_space(2),
        &OuterShape::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        },
        h,
    )
    .unwrap();
    let gauge = GaugeDescriptor::capillary_half_space(0.0, 2).unwrap();
    let f = GridField::from_fn(&half_disk, |_| 1.0);
    let rep = talenti_compare(&half_disk, &f, 0.0, &gauge).unwrap();
    println!("{}", rep.to_json_line());
    println!(
        "max gap {:.3e}, rigidity candidate: {}",
        rep.metadata["max_gap"].as_f64().unwrap(),
        rep.metadata["rigidity_candidate"]
    );

    println!("\n-- L-shaped domain, lambda = 0.5");
    let l_shape = OuterShape::Union(vec![
        OuterShape::Box {
            min: VecN::new(&[-1.0, 0.0]),
            max: VecN::new(&[0.0, 1.0]),
        },
        OuterShape::Box {
            min: VecN::new(&[-1.0, 0.0]),
            max: VecN::new(&[1.0, 0.5]),
        },
    ]);
    let lg = MaskedGrid::build(ConvexObstacle::lower_half_space(2), &l_shape, h).unwrap();
    let lgauge = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
    let lf = GridField::from_fn(&lg, |_| 1.0);
    let rep = talenti_compare(&lg, &lf, 0.5, &lgauge).unwrap();
    println!("{}", rep.to_json_line());
    println!(
        "max gap {:.3e} ({}x tolerance), rigidity candidate: {}",
        rep.metadata["max_gap"].as_f64().unwrap(),
        (rep.metadata["max_gap"].as_f64().unwrap() / rep.tolerance).round(),
        rep.metadata["rigidity_candidate"]
    );
}
