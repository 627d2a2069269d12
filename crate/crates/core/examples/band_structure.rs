//! Lowest bands of a desk-scale lattice, written as CSV.
//!
//! cargo run --release --example band_structure > bands.csv

use latticecond::bands::compute_bands;
use latticecond::model::ModelParams;
use latticecond::run::{band_summary_csv, bands_csv};

fn main() {
    env_logger::init();
    let params = ModelParams {
        ux: 1000.0,
        uy: 1000.0,
        ..ModelParams::desk(25, 25, 6)
    }
    .with_efield(4.0);

    let data = compute_bands(&params, 8).expect("band computation");
    print!("{}", bands_csv(&data));
    eprint!("{}", band_summary_csv(&data));
    eprintln!("widest band spans {:.3e}", data.max_band_width());
}
