//! Reflection off a rotated barrier: no backscattering at theta = pi.

use std::f64::consts::PI;

use latticecond::scattering::{reflection_probability, theta_sweep, ScatteringInput};

fn main() {
    let base = ScatteringInput {
        strength: 5.0,
        theta: 0.0,
        kwave: 1.0,
        mass: 1.0,
    };
    println!("{:>8} {:>12}", "theta/pi", "|V/A|^2");
    for (theta, r) in theta_sweep(&base, 11).unwrap() {
        println!("{:>8.2} {:>12.6e}", theta / PI, r.norm_sqr());
    }
    for u in [1.0, 1e3, 1e6] {
        let p = reflection_probability(&ScatteringInput {
            strength: u,
            theta: PI,
            ..base
        })
        .unwrap();
        println!("U = {u:>9.0e}, theta = pi: |V/A|^2 = {p:e}");
    }
}
