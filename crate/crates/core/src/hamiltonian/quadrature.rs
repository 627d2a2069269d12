//! Independent check of the closed-form matrix elements.
//!
//! The operator `H_k` is applied to the ket basis function directly (`p_x`
//! and `y` act through their eigenvalues, `x` and `p_y` by multiplication)
//! and the product with the conjugated bra is integrated over the
//! `x ∈ [-L/2, L/2]`, `p_y ∈ [-λL/2, λL/2]` cell with the trapezoid rule.
//! Nothing here uses the Fourier kernels of the closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::basis::{Basis, BasisIndex};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Intervals per axis of the finest trapezoid grid used.
    pub grid_points: usize,
}

impl QuadratureResult {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

fn trapezoid_weights(intervals: usize, width: f64) -> Vec<f64> {
    let h = width / intervals as f64;
    (0..=intervals)
        .map(|i| if i == 0 || i == intervals { 0.5 * h } else { h })
        .collect()
}

/// Trapezoid estimate of `⟨r| H_k |c⟩` with `grid_points` intervals per axis.
pub fn quadrature_element(
    params: &ModelParams,
    k: f64,
    r: &BasisIndex,
    c: &BasisIndex,
    grid_points: usize,
) -> Result<QuadratureResult> {
    if grid_points < 32 {
        return Err(Error::invalid(
            "grid_points",
            "at least 32 intervals per axis",
        ));
    }
    params.ensure_valid()?;
    let basis = Basis::new(params);
    if !basis.contains(r) || !basis.contains(c) {
        let bad = if basis.contains(r) { c } else { r };
        return Err(Error::IndexOutOfRange {
            n: bad.n,
            q: bad.q,
            n_max: basis.n_max,
            q_max: basis.q_max,
        });
    }

    let length = params.length();
    let lattice = length / params.n_cells as f64;
    let lambda = params.lambda;
    let m = params.mass;
    let sigma = params.spin.sign();
    let p_width = lambda * length;

    // eigenvalues of p_x + k and y on the ket
    let kx = 2.0 * PI * c.j as f64 / length + k;
    let y_ket = 2.0 * PI * c.q as f64 / p_width;
    let constant = kx * kx / (2.0 * m) - sigma * lambda * y_ket * kx / m
        + params.uy * (2.0 * PI * y_ket / lattice).cos()
        - params.charge * params.efield * y_ket;

    let n = grid_points;
    let xs: Vec<f64> = (0..=n)
        .map(|i| -0.5 * length + length * i as f64 / n as f64)
        .collect();
    let ps: Vec<f64> = (0..=n)
        .map(|i| -0.5 * p_width + p_width * i as f64 / n as f64)
        .collect();
    let wx = trapezoid_weights(n, length);
    let wp = trapezoid_weights(n, p_width);

    let dj = (c.j - r.j) as f64;
    let dq = (c.q - r.q) as f64;
    let x_phase: Vec<Complex64> = xs
        .iter()
        .zip(&wx)
        .map(|(&x, &w)| Complex64::from_polar(w, 2.0 * PI * dj * x / length))
        .collect();
    let x_potential: Vec<f64> = xs
        .iter()
        .map(|&x| params.ux * (2.0 * PI * x / lattice).cos())
        .collect();

    let mut total = Complex64::new(0.0, 0.0);
    for (&p, &w) in ps.iter().zip(&wp) {
        let mut row = Complex64::new(0.0, 0.0);
        for ((&x, phase), &ux) in xs.iter().zip(&x_phase).zip(&x_potential) {
            let shifted = p + sigma * lambda * x;
            let h = constant + shifted * shifted / (2.0 * m) + ux;
            row += phase * h;
        }
        total += row * Complex64::from_polar(w, -2.0 * PI * dq * p / p_width);
    }
    Ok(QuadratureResult {
        value: total / (length * length * lambda),
        grid_points: n,
    })
}

/// Trapezoid estimates on grids doubling from 64, combined by Richardson
/// extrapolation, until two successive extrapolants agree within
/// `rel_tol * max(|value|, 1e-6)`.
///
/// The integrand is smooth but not periodic in `x` and `p_y`, so plain
/// trapezoid error falls only as `h²`; the even-power error expansion makes
/// the extrapolation exact order by order.
pub fn converged_quadrature_element(
    params: &ModelParams,
    k: f64,
    r: &BasisIndex,
    c: &BasisIndex,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    const START: usize = 64;
    const MAX_LEVELS: usize = 7;
    let mut table: Vec<Vec<Complex64>> = Vec::new();
    let mut best_change = f64::INFINITY;
    for level in 0..MAX_LEVELS {
        let grid = START << level;
        let base = quadrature_element(params, k, r, c, grid)?.value;
        let mut row = vec![base];
        for order in 1..=level {
            let factor = 4f64.powi(order as i32) - 1.0;
            let prev = row[order - 1];
            row.push(prev + (prev - table[level - 1][order - 1]) / factor);
        }
        if level > 0 {
            let current = row[level];
            let change = (current - table[level - 1][level - 1]).norm();
            best_change = best_change.min(change);
            if change <= rel_tol * current.norm().max(1e-6) {
                return Ok(QuadratureResult {
                    value: current,
                    grid_points: grid,
                });
            }
        }
        table.push(row);
    }
    Err(Error::NonConvergence {
        iterations: MAX_LEVELS,
        residual: best_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{f_kernel, matrix_element};

    #[test]
    fn rejects_coarse_grid() {
        let params = ModelParams::desk(5, 5, 2);
        let s = Basis::new(&params).index(0, 0).unwrap();
        assert!(quadrature_element(&params, 0.0, &s, &s, 16).is_err());
    }

    #[test]
    fn diagonal_converges_to_closed_form() {
        let params = ModelParams::desk(5, 5, 2).with_efield(0.5);
        let basis = Basis::new(&params);
        let s = basis.index(1, -1).unwrap();
        let closed = matrix_element(&params, 0.4, &s, &s).unwrap();
        let coarse: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&g| quadrature_element(&params, 0.4, &s, &s, g).unwrap().re())
            .collect();
        // plain trapezoid error shrinks roughly fourfold per doubling
        let e0 = (coarse[0] - closed).abs();
        let e1 = (coarse[1] - closed).abs();
        let e2 = (coarse[2] - closed).abs();
        assert!(e1 < e0 && e2 < e1);
        let limit = converged_quadrature_element(&params, 0.4, &s, &s, 1e-7).unwrap();
        assert!((limit.re() - closed).abs() <= 1e-6 * closed.abs());
        assert!(limit.im().abs() < 1e-8);
    }

    #[test]
    fn position_block_only() {
        // same j, different q: only the p_y² piece couples them
        let params = ModelParams::desk(5, 5, 2);
        let basis = Basis::new(&params);
        let r = basis.index(0, -2).unwrap();
        let c = basis.index(1, 0).unwrap();
        assert_eq!(r.j, c.j);
        let l = params.length();
        let expected = l * l / (4.0 * PI * PI) * f_kernel(-2, 0);
        let oracle = converged_quadrature_element(&params, 0.0, &r, &c, 1e-7).unwrap();
        assert!((oracle.re() - expected).abs() <= 1e-6 * expected.abs());
    }
}
