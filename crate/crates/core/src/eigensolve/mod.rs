//! Lowest eigenpairs of the real symmetric Hamiltonian.
//!
//! Two paths share one contract: eigenvalues ascending, eigenvectors
//! orthonormal, every residual `‖Hv - εv‖ ≤ tol ‖H‖`. The dense path
//! diagonalizes the full matrix; the Lanczos path only needs matrix-vector
//! products and is meant for dimensions where storing `H` is impractical.

mod dense;
mod lanczos;

pub use dense::lowest_eigenpairs;
pub use lanczos::{lowest_eigenpairs_lanczos, LanczosOptions};

use crate::hamiltonian::SymmetricOperator;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Lowest eigenpairs of `H_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub k: f64,
    /// Ascending energies.
    pub eigenvalues: Vec<f64>,
    /// Unit coefficient vectors `c_{n,q}` in basis row order.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    /// Estimate of `‖H‖` used for the residual bound.
    pub norm_estimate: f64,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max |⟨v_i, v_j⟩ - δ_ij|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// `‖A v - θ v‖` computed explicitly.
pub fn residual_norm<A: SymmetricOperator + ?Sized>(op: &A, value: f64, vector: &[f64]) -> f64 {
    let mut av = vec![0.0; vector.len()];
    op.apply(vector, &mut av);
    av.iter()
        .zip(vector)
        .map(|(a, v)| (a - value * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Fixes the arbitrary sign of an eigenvector: the largest-magnitude
/// component (first one on ties) becomes positive.
pub(crate) fn canonical_sign(vector: &mut [f64]) {
    let mut pivot = 0;
    for (i, v) in vector.iter().enumerate() {
        if v.abs() > vector[pivot].abs() * (1.0 + 1e-12) {
            pivot = i;
        }
    }
    if vector.get(pivot).is_some_and(|v| *v < 0.0) {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
}
