use nalgebra::SymmetricEigen;

use super::{canonical_sign, residual_norm, EigenResult};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianMatrix;

/// The `count` algebraically smallest eigenpairs by full dense
/// diagonalization.
pub fn lowest_eigenpairs(h: &HamiltonianMatrix, count: usize, tol: f64) -> Result<EigenResult> {
    let dim = h.dim();
    if count == 0 || count > dim {
        return Err(Error::TooManyEigenpairs {
            requested: count,
            dim,
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "tolerance must be positive"));
    }
    let eigen = SymmetricEigen::new(h.entries.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let norm_estimate = eigen
        .eigenvalues
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut residual_norms = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        let value = eigen.eigenvalues[idx];
        let mut vector: Vec<f64> = eigen.eigenvectors.column(idx).iter().copied().collect();
        canonical_sign(&mut vector);
        let residual = residual_norm(h, value, &vector);
        if residual > tol * norm_estimate {
            return Err(Error::NonConvergence {
                iterations: 1,
                residual,
            });
        }
        eigenvalues.push(value);
        eigenvectors.push(vector);
        residual_norms.push(residual);
    }
    Ok(EigenResult {
        k: h.k,
        eigenvalues,
        eigenvectors,
        residual_norms,
        norm_estimate,
    })
}

#[cfg(test)]
mod tests {
    use nalgebra::DMatrix;

    use super::*;
    use crate::model::Spin;

    fn wrap(entries: DMatrix<f64>) -> HamiltonianMatrix {
        HamiltonianMatrix {
            k: 0.0,
            spin: Spin::Up,
            entries,
        }
    }

    #[test]
    fn pauli_x() {
        let h = wrap(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        let r = lowest_eigenpairs(&h, 2, 1e-10).unwrap();
        assert!((r.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(r.orthonormality_error() < 1e-14);
    }

    #[test]
    fn diagonal_matrix() {
        let h = wrap(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            3.0, 1.0, 2.0,
        ])));
        let r = lowest_eigenpairs(&h, 2, 1e-10).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 2.0]);
        assert_eq!(r.eigenvectors[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(r.eigenvectors[1], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn count_checked() {
        let h = wrap(DMatrix::identity(3, 3));
        assert!(lowest_eigenpairs(&h, 0, 1e-10).is_err());
        assert!(lowest_eigenpairs(&h, 4, 1e-10).is_err());
    }
}
