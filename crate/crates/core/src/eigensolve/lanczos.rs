//! Thick-restart Lanczos with full reorthogonalization.
//!
//! The projected matrix is filled from the Gram-Schmidt coefficients, so
//! after a restart the coupling between the kept Ritz vectors and the new
//! Lanczos vector appears without special bookkeeping.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{canonical_sign, residual_norm, EigenResult, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::hamiltonian::SymmetricOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub tol: f64,
    /// Krylov subspace size; 0 picks `max(2 count + 20, 40)`.
    pub krylov_dim: usize,
    pub max_restarts: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: DEFAULT_TOL,
            krylov_dim: 0,
            max_restarts: 2000,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Deterministic pseudo-random vector (splitmix64).
fn start_vector(dim: usize, salt: u64) -> Vec<f64> {
    (0..dim as u64)
        .map(|i| {
            let mut z = i
                .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
                .wrapping_add(0x9E37_79B9_7F4A_7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Removes the components along `basis` (two passes), returning the
/// accumulated coefficients.
fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        for (c, v) in coeffs.iter_mut().zip(basis) {
            let h = dot(v, w);
            *c += h;
            w.iter_mut().zip(v).for_each(|(x, y)| *x -= h * y);
        }
    }
    coeffs
}

pub fn lowest_eigenpairs_lanczos<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: f64,
    count: usize,
    options: &LanczosOptions,
) -> Result<EigenResult> {
    let dim = op.dim();
    if count == 0 || count > dim {
        return Err(Error::TooManyEigenpairs {
            requested: count,
            dim,
        });
    }
    if !(options.tol > 0.0) {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    let wanted = if options.krylov_dim == 0 {
        (2 * count + 20).max(40)
    } else {
        options.krylov_dim
    };
    let ncv = wanted.max(count + 2).min(dim);
    if ncv < count + 2 || ncv == dim {
        return small_problem(op, k, count, options.tol);
    }

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(ncv + 1);
    let mut first = start_vector(dim, 1);
    normalize(&mut first);
    basis.push(first);
    let mut projected = DMatrix::<f64>::zeros(ncv, ncv);
    let mut kept = 0;
    let mut norm_estimate = 0.0f64;
    let mut best_residual = f64::INFINITY;
    let mut w = vec![0.0; dim];
    let mut salt = 2;

    for restart in 0..options.max_restarts {
        let mut beta = 0.0;
        for j in kept..ncv {
            op.apply(&basis[j], &mut w);
            let coeffs = orthogonalize(&mut w, &basis[..=j]);
            for (i, c) in coeffs.into_iter().enumerate() {
                projected[(i, j)] = c;
                projected[(j, i)] = c;
            }
            beta = dot(&w, &w).sqrt();
            if j + 1 == ncv {
                break;
            }
            if beta <= 1e-14 * norm_estimate.max(projected[(j, j)].abs()).max(1e-300) {
                // invariant subspace: continue from a fresh direction
                let mut fresh = start_vector(dim, salt);
                salt += 1;
                orthogonalize(&mut fresh, &basis);
                normalize(&mut fresh);
                basis.push(fresh);
                projected[(j + 1, j)] = 0.0;
                projected[(j, j + 1)] = 0.0;
            } else {
                basis.push(w.iter().map(|x| x / beta).collect());
                projected[(j + 1, j)] = beta;
                projected[(j, j + 1)] = beta;
            }
        }

        let eigen = SymmetricEigen::new(projected.clone());
        let mut order: Vec<usize> = (0..ncv).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
        for v in eigen.eigenvalues.iter() {
            norm_estimate = norm_estimate.max(v.abs());
        }
        let bound = options.tol * norm_estimate;
        let estimates: Vec<f64> = order
            .iter()
            .take(count)
            .map(|&i| beta * eigen.eigenvectors[(ncv - 1, i)].abs())
            .collect();
        let worst = estimates.iter().fold(0.0f64, |m, &r| m.max(r));
        best_residual = best_residual.min(worst);
        log::trace!("lanczos restart {restart}: worst residual estimate {worst:e}");

        let ritz = |idx: usize| -> Vec<f64> {
            let mut x = vec![0.0; dim];
            for (l, v) in basis.iter().take(ncv).enumerate() {
                let s = eigen.eigenvectors[(l, idx)];
                x.iter_mut().zip(v).for_each(|(a, b)| *a += s * b);
            }
            x
        };

        if worst <= bound {
            let mut eigenvalues = Vec::with_capacity(count);
            let mut eigenvectors = Vec::with_capacity(count);
            let mut residual_norms = Vec::with_capacity(count);
            let mut accepted = true;
            for &idx in order.iter().take(count) {
                let mut x = ritz(idx);
                normalize(&mut x);
                canonical_sign(&mut x);
                let value = eigen.eigenvalues[idx];
                let residual = residual_norm(op, value, &x);
                if residual > bound {
                    accepted = false;
                    break;
                }
                eigenvalues.push(value);
                eigenvectors.push(x);
                residual_norms.push(residual);
            }
            if accepted {
                return Ok(EigenResult {
                    k,
                    eigenvalues,
                    eigenvectors,
                    residual_norms,
                    norm_estimate,
                });
            }
        }

        // thick restart on the lowest Ritz vectors
        kept = (count + (ncv - count) / 2).min(ncv - 1);
        let mut next: Vec<Vec<f64>> = order.iter().take(kept).map(|&i| ritz(i)).collect();
        let mut tail = w.clone();
        let tail_norm = normalize(&mut tail);
        if tail_norm == 0.0 {
            tail = start_vector(dim, salt);
            salt += 1;
        }
        orthogonalize(&mut tail, &next);
        normalize(&mut tail);
        next.push(tail);
        basis = next;
        projected.fill(0.0);
        for (i, &idx) in order.iter().take(kept).enumerate() {
            projected[(i, i)] = eigen.eigenvalues[idx];
        }
    }
    Err(Error::NonConvergence {
        iterations: options.max_restarts,
        residual: best_residual,
    })
}

/// Krylov space would span everything: diagonalize the explicit matrix.
fn small_problem<A: SymmetricOperator + ?Sized>(
    op: &A,
    k: f64,
    count: usize,
    tol: f64,
) -> Result<EigenResult> {
    let dim = op.dim();
    let mut dense = DMatrix::<f64>::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for c in 0..dim {
        e.fill(0.0);
        e[c] = 1.0;
        op.apply(&e, &mut col);
        for (r, v) in col.iter().enumerate() {
            dense[(r, c)] = *v;
        }
    }
    let dense = (&dense + dense.transpose()) * 0.5;
    let h = crate::hamiltonian::HamiltonianMatrix {
        k,
        spin: crate::model::Spin::Up,
        entries: dense,
    };
    super::lowest_eigenpairs(&h, count, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::lowest_eigenpairs;
    use crate::hamiltonian::{build, ToeplitzHamiltonian};
    use crate::model::ModelParams;

    #[test]
    fn agrees_with_dense_on_desk_scale() {
        let params = ModelParams::desk(5, 5, 2).with_efield(0.3);
        let dense = build(&params, 0.2).unwrap();
        let reference = lowest_eigenpairs(&dense, 3, DEFAULT_TOL).unwrap();
        let options = LanczosOptions {
            krylov_dim: 12,
            ..LanczosOptions::default()
        };
        let iterative = lowest_eigenpairs_lanczos(&dense, 0.2, 3, &options).unwrap();
        for (a, b) in reference.eigenvalues.iter().zip(&iterative.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(iterative.orthonormality_error() < 1e-10);
    }

    #[test]
    fn matrix_free_operator_on_larger_basis() {
        let params = ModelParams::desk(15, 13, 4).with_efield(0.7);
        let dense = build(&params, -0.4).unwrap();
        let reference = lowest_eigenpairs(&dense, 6, DEFAULT_TOL).unwrap();
        let op = ToeplitzHamiltonian::new(&params, -0.4).unwrap();
        let iterative =
            lowest_eigenpairs_lanczos(&op, -0.4, 6, &LanczosOptions::default()).unwrap();
        for (a, b) in reference.eigenvalues.iter().zip(&iterative.eigenvalues) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        for (r, bound) in iterative
            .residual_norms
            .iter()
            .zip(std::iter::repeat(DEFAULT_TOL * iterative.norm_estimate))
        {
            assert!(*r <= bound);
        }
    }
}
