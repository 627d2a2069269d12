use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::basis::{Basis, BasisIndex};
use super::kernels::{f_kernel, g_kernel};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Spin};

/// Dense real symmetric `H_k` for one wavenumber and one spin sector.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub k: f64,
    pub spin: Spin,
    pub entries: DMatrix<f64>,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `max |M - Mᵀ|` over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in (r + 1)..d {
                worst = worst.max((self.entries[(r, c)] - self.entries[(c, r)]).abs());
            }
        }
        worst
    }
}

/// Element `⟨r| H_k |c⟩`.
///
/// The spin sector enters through `σ = ±1` in the two terms linear in the
/// spin-orbit coupling; the `λ²` pieces do not depend on it.
pub fn matrix_element(params: &ModelParams, k: f64, r: &BasisIndex, c: &BasisIndex) -> Result<f64> {
    let basis = Basis::new(params);
    for idx in [r, c] {
        if !basis.contains(idx) {
            return Err(Error::IndexOutOfRange {
                n: idx.n,
                q: idx.q,
                n_max: basis.n_max,
                q_max: basis.q_max,
            });
        }
    }
    let geometry = params.geometry();
    Ok(element_unchecked(
        params,
        geometry.length,
        geometry.lattice_constant,
        k,
        r,
        c,
    ))
}

/// Diagonal element for state `(n, q)`; shared with the matrix-free operator.
pub fn diagonal_element(
    params: &ModelParams,
    length: f64,
    lattice: f64,
    k: f64,
    j: i64,
    q: i64,
) -> f64 {
    let m = params.mass;
    let lambda = params.lambda;
    let sigma = params.spin.sign();
    let block = lambda * lambda * length * length / (4.0 * PI * PI * m);
    let kx = 2.0 * PI * j as f64 / length + k;
    let qf = q as f64;

    kx * kx / (2.0 * m) + block * (f_kernel(q, q) + f_kernel(j, j))
        - sigma * (2.0 * PI * qf / (m * length)) * kx
        + params.uy * (4.0 * PI * PI * qf / (lattice * lambda * length)).cos()
        - params.charge * params.efield * 2.0 * PI * qf / (lambda * length)
}

pub(crate) fn element_unchecked(
    params: &ModelParams,
    length: f64,
    lattice: f64,
    k: f64,
    r: &BasisIndex,
    c: &BasisIndex,
) -> f64 {
    if r.row == c.row {
        return diagonal_element(params, length, lattice, k, c.j, c.q);
    }
    let lambda = params.lambda;
    let sigma = params.spin.sign();
    let block = lambda * lambda * length * length / (4.0 * PI * PI * params.mass);

    let mut inner = sigma * g_kernel(r.q, c.q) * g_kernel(r.j, c.j);
    if r.j == c.j {
        inner += f_kernel(r.q, c.q);
    }
    if r.q == c.q {
        inner += f_kernel(r.j, c.j);
    }
    let mut value = block * inner;
    if r.q == c.q && (r.j - c.j).abs() == params.n_cells as i64 {
        value += params.ux / 2.0;
    }
    value
}

/// Assembles the full `D x D` matrix, both triangles evaluated independently.
pub fn build(params: &ModelParams, k: f64) -> Result<HamiltonianMatrix> {
    params.ensure_valid()?;
    let basis = Basis::new(params);
    let dim = basis.dim();
    let len = dim.checked_mul(dim).ok_or(Error::Resource {
        dim,
        bytes: (dim as u128) * (dim as u128) * 8,
    })?;
    let mut storage: Vec<f64> = Vec::new();
    storage
        .try_reserve_exact(len)
        .map_err(|_| Error::Resource {
            dim,
            bytes: (len as u128) * 8,
        })?;
    storage.resize(len, 0.0);

    let geometry = params.geometry();
    let states: Vec<BasisIndex> = basis.iter().collect();
    storage
        .par_chunks_mut(dim)
        .zip(states.par_iter())
        .for_each(|(row, r)| {
            for (slot, c) in row.iter_mut().zip(&states) {
                *slot =
                    element_unchecked(params, geometry.length, geometry.lattice_constant, k, r, c);
            }
        });

    Ok(HamiltonianMatrix {
        k,
        spin: params.spin,
        entries: DMatrix::from_row_slice(dim, dim, &storage),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> ModelParams {
        ModelParams::desk(5, 5, 2)
    }

    #[test]
    fn origin_diagonal() {
        let params = ModelParams::default();
        let basis = Basis::new(&params);
        let origin = basis.index(0, 0).unwrap();
        let value = matrix_element(&params, 0.0, &origin, &origin).unwrap();
        let l = params.length();
        let expected = l * l / (4.0 * PI * PI) * (PI * PI / 3.0) + params.uy;
        assert!((value - expected).abs() < 1e-10 * expected);
        assert!((value - (l * l / 12.0 + 1000.0)).abs() < 1e-9);
    }

    #[test]
    fn ux_hopping() {
        let params = ModelParams::default();
        let basis = Basis::new(&params);
        let r = basis.index(1, 0).unwrap();
        let c = basis.index(0, 0).unwrap();
        assert_eq!(r.j, 10);
        let l = params.length();
        let expected = 500.0 + l * l / (4.0 * PI * PI) * f_kernel(10, 0);
        let value = matrix_element(&params, 0.3, &r, &c).unwrap();
        assert!((value - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn field_enters_diagonal_linearly() {
        let p0 = desk();
        let p1 = desk().with_efield(1.0);
        let basis = Basis::new(&p0);
        let s = basis.index(0, 1).unwrap();
        let d =
            matrix_element(&p1, 0.2, &s, &s).unwrap() - matrix_element(&p0, 0.2, &s, &s).unwrap();
        let expected = -2.0 * PI / (p0.lambda * p0.length());
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn small_build_is_symmetric() {
        for spin in [Spin::Up, Spin::Down] {
            let params = ModelParams {
                spin,
                ..ModelParams::desk(3, 3, 2)
            };
            let h = build(&params, 0.7).unwrap();
            assert_eq!(h.dim(), 9);
            assert_eq!(h.max_asymmetry(), 0.0);
        }
    }

    #[test]
    fn build_matches_elements() {
        let params = desk().with_efield(0.4);
        let basis = Basis::new(&params);
        let h = build(&params, -0.3).unwrap();
        for r in basis.iter() {
            for c in basis.iter() {
                assert_eq!(
                    h.entries[(r.row, c.row)],
                    matrix_element(&params, -0.3, &r, &c).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_foreign_index() {
        let params = desk();
        let other = Basis::new(&ModelParams::desk(9, 9, 2));
        let far = other.index(4, 4).unwrap();
        let near = Basis::new(&params).index(0, 0).unwrap();
        assert!(matrix_element(&params, 0.0, &far, &near).is_err());
    }
}
