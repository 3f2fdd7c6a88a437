//! Evaluate the capillary gauge and its dual, and verify the polarity
//! identities (unit Wulff normal, Euler identity, involution) on random
//! samples for a range of contact parameters.

use capsym::gauge::{polar_sup, GaugeDescriptor};
use capsym::vecn::VecN;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    println!("-- dual gauge values");
    let gauge = GaugeDescriptor::capillary_half_space(0.5, 2).unwrap();
    for x in [
        VecN::new(&[0.0, 1.0]),
        VecN::new(&[1.0, 0.0]),
        VecN::new(&[0.0, -1.0]),
    ] {
        let closed = gauge.dual(x, None).unwrap().value;
        let brute = polar_sup(&gauge, x, None, 20_000);
        println!(
            "lambda=0.5  F^o({:?}) = {closed:.12}   (sampled sup {brute:.12})",
            x
        );
    }

    println!("\n-- polarity residuals, 1000 samples each");
    for &n in &[2usize, 3] {
        for &lambda in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
            let gauge = GaugeDescriptor::capillary_half_space(lambda, n).unwrap();
            let samples: Vec<VecN> = (0..1000)
                .map(|_| {
                    let mut v = VecN::zero(n);
                    for k in 0..n {
                        v[k] = rng.gen_range(-1.0..1.0);
                    }
                    if v.norm() < 1e-2 {
                        v[0] += 0.5;
                    }
                    v
                })
                .collect();
            let rep = gauge.check_polarity(&samples, None).unwrap();
            println!(
                "n={n} lambda={lambda:+.1}: unit-normal {:.2e}  euler {:.2e}  involution {:.2e}",
                rep.unit_wulff_normal, rep.euler_identity, rep.involution
            );
        }
    }

    println!("\n-- Wulff ball volumes (independent of lambda)");
    for &n in &[2usize, 3] {
        for &lambda in &[0.0, 0.5] {
            let gauge = GaugeDescriptor::capillary_half_space(lambda, n).unwrap();
            println!(
                "n={n} lambda={lambda:.1}: |Wulff ball| = {:.10}",
                gauge.wulff_ball_volume(None).unwrap()
            );
        }
    }
}
