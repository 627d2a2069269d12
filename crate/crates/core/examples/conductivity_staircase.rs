//! Quantized transverse conductivity versus field at two Fermi levels.
//!
//! Each band is localized near one row of lattice minima and carries a
//! momentum sum that is an odd multiple of a common unit, so filling bands
//! one at a time produces a staircase.
//!
//! cargo run --release --example conductivity_staircase

use latticecond::bands::BandOptions;
use latticecond::conductivity::{estimate_sigma0, sweep};
use latticecond::model::ModelParams;

fn main() {
    env_logger::init();
    let params = ModelParams {
        ux: 1000.0,
        uy: 1000.0,
        ..ModelParams::desk(25, 25, 6)
    };
    let efields: Vec<f64> = (0..=24).map(|i| 0.25 * i as f64).collect();
    let fermi = [-1952.5, -1960.0];

    let mut result = sweep(&params, &efields, &fermi, &BandOptions::new(12)).expect("sweep");
    let estimate = estimate_sigma0(&result.curves).expect("quantization unit");
    estimate.annotate(&mut result.curves);

    println!(
        "unit sigma0/alpha = {:.4} (residual {:.2}%)",
        estimate.unit,
        100.0 * estimate.residual
    );
    println!(
        "(N + 1) lambda a / 2 = {:.4}",
        7.0 * params.lattice_constant() / 2.0
    );
    for curve in &result.curves {
        println!("\nFermi level {}", curve.fermi_level);
        let steps = curve.integer_steps.clone().unwrap_or_default();
        for (i, e) in curve.efield_values.iter().enumerate() {
            println!(
                "  E = {e:5.2}  sigma = {:9.4}  steps = {:2}  bands = {}",
                curve.sigma_over_alpha[i],
                steps.get(i).copied().unwrap_or(0),
                curve.bands_included[i]
            );
        }
        println!("  jumps at {:?}", curve.jump_locations);
        println!("  crossings at {:?}", result.crossings(curve.fermi_level));
        if let Some(limit) = curve.zero_field_limit() {
            println!("  sigma(E -> 0+) = {limit:.4}");
        }
    }
}
