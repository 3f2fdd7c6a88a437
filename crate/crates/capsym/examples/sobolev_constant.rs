//! Estimate the sharp Sobolev constant outside the half-space obstacle:
//! cut-off extremals on growing balls from above, minimized quotients on
//! a grid from below, random fields in between.

use capsym::gauge::GaugeDescriptor;
use capsym::geometry::grid::{GridField, MaskedGrid};
use capsym::geometry::obstacle::{ConvexObstacle, OuterShape};
use capsym::vecn::VecN;
use capsym::verify::sobolev::{best_constant_estimate, min_quotient, sobolev_quotient};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let lambda = 0.3;

    println!("-- cut-off extremal quotients, n = 3, p = 2");
    let (value, trace) = best_constant_estimate(lambda, 2.0, 3, &[16.0, 64.0, 256.0, 1024.0]).unwrap();
    for (r, q) in &trace {
        println!("ball radius {r:>6}: quotient {q:.8}");
    }
    println!("best estimate: {value:.8}");

    println!("\n-- grid minimization, n = 2, p = 1.5 (so p* = 6)");
    let p = 1.5;
    let q = 2.0 * p / (2.0 - p);
    let grid = MaskedGrid::build(
        ConvexObstacle::lower_half_space(2),
        &OuterShape::Ball {
            center: VecN::zero(2),
            radius: 1.0,
        },
        1.0 / 32.0,
    )
    .unwrap();
    let gauge = GaugeDescriptor::capillary_half_space(lambda, 2).unwrap();
    let est = min_quotient(&grid, &gauge, p, q, 7, 3).unwrap();
    println!("minimized quotient: {est:.8}");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for _ in 0..10 {
        let c = VecN::new(&[rng.gen_range(-0.5..0.5), rng.gen_range(0.0..0.5)]);
        let u = GridField::from_fn_dirichlet(&grid, |x| (-(x - c).dot(&(x - c)) / 0.09).exp());
        worst = worst.min(sobolev_quotient(&grid, &u, &gauge, p).unwrap());
    }
    println!("smallest quotient over 10 random bumps: {worst:.8} (never below the minimum)");
}
