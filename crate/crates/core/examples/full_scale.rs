//! Lowest eigenvalues at the reference size (D = 20301) with the
//! matrix-free operator and thick-restart Lanczos.
//!
//! cargo run --release --example full_scale -- [k-index l] [bands]

use std::time::Instant;

use latticecond::eigensolve::{lowest_eigenpairs_lanczos, LanczosOptions};
use latticecond::hamiltonian::ToeplitzHamiltonian;
use latticecond::model::ModelParams;

fn main() {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let l: i64 = args.first().map_or(0, |s| s.parse().expect("l"));
    let bands: usize = args.get(1).map_or(12, |s| s.parse().expect("bands"));

    let params = ModelParams::default();
    let k = 2.0 * std::f64::consts::PI * l as f64 / params.length();
    println!("D = {}, k = {k:.6}", params.dim());

    let start = Instant::now();
    let op = ToeplitzHamiltonian::new(&params, k).expect("operator");
    let result =
        lowest_eigenpairs_lanczos(&op, k, bands, &LanczosOptions::default()).expect("lanczos");
    println!("solved in {:.1} s", start.elapsed().as_secs_f64());
    for (i, (e, r)) in result
        .eigenvalues
        .iter()
        .zip(&result.residual_norms)
        .enumerate()
    {
        println!("{i:3} {e:20.10} residual {r:.2e}");
    }
}
