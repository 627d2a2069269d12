//! Derived geometry and resource estimate for a parameter set.
//!
//! cargo run --example geometry -- 101 1.0 10

use latticecond::model::{derive_geometry, ModelParams};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let q: usize = args.first().map_or(101, |s| s.parse().expect("Q"));
    let lambda: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("lambda"));
    let n: usize = args.get(2).map_or(10, |s| s.parse().expect("N"));

    let g = match derive_geometry(q, lambda, n) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    println!("L      = {:.6}", g.length);
    println!("a      = {:.6}", g.lattice_constant);
    println!("q_max  = {}", g.q_max);

    let params = ModelParams {
        q_states: q,
        lambda,
        n_cells: n,
        ..ModelParams::default()
    };
    let report = params.validate();
    println!("D      = {}", report.dim);
    println!(
        "dense matrix ~ {:.1} MiB",
        report.dense_matrix_bytes as f64 / (1024.0 * 1024.0)
    );
    for v in &report.violations {
        println!("violation: {v}");
    }
}
