//! Matrix-free application of `H_k`.
//!
//! Off the diagonal every element depends only on the index differences
//! `(Δn, Δq)`, so `H_k = diag + K *` where `K *` is a two-dimensional
//! Toeplitz convolution over the `(n, q)` grid. It is applied with
//! zero-padded FFTs in `O(D log D)` without ever storing the `D x D` matrix.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::basis::Basis;
use super::kernels::{f_kernel, g_kernel};
use super::matrix::{diagonal_element, HamiltonianMatrix};
use crate::error::Result;
use crate::model::ModelParams;

/// A real symmetric linear operator of fixed dimension.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymmetricOperator for HamiltonianMatrix {
    fn dim(&self) -> usize {
        self.entries.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let d = self.dim();
        y.fill(0.0);
        // column-major storage: accumulate column by column
        for (c, &xc) in x.iter().enumerate().take(d) {
            if xc == 0.0 {
                continue;
            }
            let column = self.entries.column(c);
            for (yr, &a) in y.iter_mut().zip(column.iter()) {
                *yr += a * xc;
            }
        }
    }
}

pub struct ToeplitzHamiltonian {
    pub k: f64,
    rows: usize,
    cols: usize,
    padded_rows: usize,
    padded_cols: usize,
    diagonal: Vec<f64>,
    kernel_spectrum: Vec<Complex64>,
    row_fft: Arc<dyn Fft<f64>>,
    row_ifft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
    col_ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ToeplitzHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ToeplitzHamiltonian")
            .field("k", &self.k)
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish()
    }
}

impl ToeplitzHamiltonian {
    pub fn new(params: &ModelParams, k: f64) -> Result<Self> {
        params.ensure_valid()?;
        let basis = Basis::new(params);
        let geometry = params.geometry();
        let (length, lattice) = (geometry.length, geometry.lattice_constant);
        let rows = basis.j_states();
        let cols = basis.q_states();
        let padded_rows = 2 * rows;
        let padded_cols = 2 * cols;

        let diagonal = basis
            .iter()
            .map(|s| diagonal_element(params, length, lattice, k, s.j, s.q))
            .collect();

        let lambda = params.lambda;
        let block = lambda * lambda * length * length / (4.0 * PI * PI * params.mass);
        let sigma = params.spin.sign();
        let n_cells = params.n_cells as i64;
        let mut kernel = vec![Complex64::new(0.0, 0.0); padded_rows * padded_cols];
        let (span_n, span_q) = (rows as i64 - 1, cols as i64 - 1);
        for dn in -span_n..=span_n {
            for dq in -span_q..=span_q {
                if dn == 0 && dq == 0 {
                    continue;
                }
                let dj = n_cells * dn - dq;
                let mut inner = sigma * g_kernel(dq, 0) * g_kernel(dj, 0);
                if dj == 0 {
                    inner += f_kernel(dq, 0);
                }
                if dq == 0 {
                    inner += f_kernel(dj, 0);
                }
                let mut value = block * inner;
                if dq == 0 && dj.abs() == n_cells {
                    value += params.ux / 2.0;
                }
                let a = dn.rem_euclid(padded_rows as i64) as usize;
                let b = dq.rem_euclid(padded_cols as i64) as usize;
                kernel[a * padded_cols + b] = Complex64::new(value, 0.0);
            }
        }

        let mut planner = FftPlanner::new();
        let row_fft = planner.plan_fft_forward(padded_cols);
        let row_ifft = planner.plan_fft_inverse(padded_cols);
        let col_fft = planner.plan_fft_forward(padded_rows);
        let col_ifft = planner.plan_fft_inverse(padded_rows);

        let mut op = ToeplitzHamiltonian {
            k,
            rows,
            cols,
            padded_rows,
            padded_cols,
            diagonal,
            kernel_spectrum: Vec::new(),
            row_fft,
            row_ifft,
            col_fft,
            col_ifft,
        };
        op.forward_2d(&mut kernel, padded_rows);
        op.kernel_spectrum = kernel;
        Ok(op)
    }

    /// Diagonal of `H_k` in row order.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Rows `occupied..` are assumed zero and skipped in the row pass.
    fn forward_2d(&self, data: &mut [Complex64], occupied: usize) {
        for row in data.chunks_exact_mut(self.padded_cols).take(occupied) {
            self.row_fft.process(row);
        }
        self.column_pass(data, &self.col_fft);
    }

    fn column_pass(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let mut column = vec![Complex64::new(0.0, 0.0); self.padded_rows];
        for c in 0..self.padded_cols {
            for (r, slot) in column.iter_mut().enumerate() {
                *slot = data[r * self.padded_cols + c];
            }
            fft.process(&mut column);
            for (r, value) in column.iter().enumerate() {
                data[r * self.padded_cols + c] = *value;
            }
        }
    }
}

impl SymmetricOperator for ToeplitzHamiltonian {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut buffer = vec![Complex64::new(0.0, 0.0); self.padded_rows * self.padded_cols];
        for (r, chunk) in x.chunks_exact(self.cols).enumerate() {
            for (c, &v) in chunk.iter().enumerate() {
                buffer[r * self.padded_cols + c] = Complex64::new(v, 0.0);
            }
        }
        self.forward_2d(&mut buffer, self.rows);
        for (b, k) in buffer.iter_mut().zip(&self.kernel_spectrum) {
            *b *= k;
        }
        self.column_pass(&mut buffer, &self.col_ifft);
        let scale = 1.0 / (self.padded_rows * self.padded_cols) as f64;
        for (r, out) in y.chunks_exact_mut(self.cols).enumerate() {
            let row = &mut buffer[r * self.padded_cols..(r + 1) * self.padded_cols];
            self.row_ifft.process(row);
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = row[c].re * scale;
            }
        }
        for ((yi, &d), &xi) in y.iter_mut().zip(&self.diagonal).zip(x) {
            *yi += d * xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build;
    use crate::model::Spin;

    #[test]
    fn matches_dense_product() {
        for spin in [Spin::Up, Spin::Down] {
            let params = ModelParams {
                spin,
                efield: 0.8,
                ..ModelParams::desk(7, 5, 4)
            };
            let dense = build(&params, 0.35).unwrap();
            let fast = ToeplitzHamiltonian::new(&params, 0.35).unwrap();
            let d = dense.dim();
            let x: Vec<f64> = (0..d)
                .map(|i| ((i * 7919) % 23) as f64 / 23.0 - 0.4)
                .collect();
            let mut y_dense = vec![0.0; d];
            let mut y_fast = vec![0.0; d];
            dense.apply(&x, &mut y_dense);
            fast.apply(&x, &mut y_fast);
            let scale = y_dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in y_dense.iter().zip(&y_fast) {
                assert!((a - b).abs() < 1e-12 * scale, "{a} vs {b}");
            }
        }
    }
}
