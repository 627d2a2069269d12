//! The k-space Hamiltonian in the `(n, q)` symmetry-adapted basis.
//!
//! Basis states are plane waves in `x` and in `p_y`,
//! `φ_{j,q}(x, p_y) = exp(2πi j x / L) exp(-2πi q p_y / (λL)) / (L sqrt(λ))`,
//! with the momentum integer tied to the cell index by `j = N n - q`. In this
//! basis every matrix element is real and the matrix is dense.

mod basis;
mod dump;
mod kernels;
mod matrix;
mod operator;
mod quadrature;

pub use basis::{Basis, BasisIndex};
pub use dump::{read_matrix_dump, write_matrix_dump, DUMP_MAGIC};
pub use kernels::{f_kernel, g_kernel};
pub use matrix::{build, diagonal_element, matrix_element, HamiltonianMatrix};
pub use operator::{SymmetricOperator, ToeplitzHamiltonian};
pub use quadrature::{converged_quadrature_element, quadrature_element, QuadratureResult};
