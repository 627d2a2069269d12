//! Closed-form matrix elements against direct numerical integration.

use std::f64::consts::PI;

use latticecond::hamiltonian::{converged_quadrature_element, matrix_element, Basis};
use latticecond::model::ModelParams;

fn main() {
    let params = ModelParams::desk(5, 5, 2).with_efield(1.0);
    let basis = Basis::new(&params);
    let k = 2.0 * PI / params.length();

    let pairs = [
        ((0, 0), (0, 0)),
        ((0, -2), (1, 0)),
        ((1, 1), (-1, 1)),
        ((0, 2), (0, -1)),
    ];
    println!(
        "{:>10} {:>10} {:>22} {:>22} {:>10}",
        "row", "col", "closed form", "quadrature", "rel dev"
    );
    for ((n1, q1), (n2, q2)) in pairs {
        let r = basis.index(n1, q1).unwrap();
        let c = basis.index(n2, q2).unwrap();
        let closed = matrix_element(&params, k, &r, &c).unwrap();
        let oracle = converged_quadrature_element(&params, k, &r, &c, 1e-8).unwrap();
        let dev = (closed - oracle.re()).abs() / oracle.re().abs().max(1e-300);
        println!(
            "{:>10} {:>10} {:>22.14e} {:>22.14e} {:>10.2e}",
            format!("({n1},{q1})"),
            format!("({n2},{q2})"),
            closed,
            oracle.re(),
            dev
        );
    }
}
