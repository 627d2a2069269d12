//! Self-checks on a small basis: symmetry, oracle agreement, eigenpair
//! residuals, reflection symmetry and the field derivative identity.

use latticecond::model::ModelParams;
use latticecond::verify::{run_verification, Level};

fn main() {
    env_logger::init();
    let params = ModelParams::desk(7, 7, 2);
    let report = run_verification(&params, Level::Quick).expect("verification");
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
}
