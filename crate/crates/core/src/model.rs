//! Physical and truncation parameters of the lattice model.
//!
//! The magnetic-translation symmetry ties the system length to the number of
//! position states: `L = sqrt(2π (Q - 1) / λ)`. Everything geometric is
//! therefore derived here from `(Q, λ, N)` and never set independently.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Sector of the conserved `σ_z` spin component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Spin {
    #[default]
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Spin::Up => 1,
            Spin::Down => -1,
        }
    }

    pub fn from_i32(value: i32) -> Option<Spin> {
        match value {
            1 => Some(Spin::Up),
            -1 => Some(Spin::Down),
            _ => None,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i32())
    }
}

/// Geometry forced by the symmetry: system length, lattice constant and the
/// largest position index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Geometry {
    pub length: f64,
    pub lattice_constant: f64,
    pub q_max: i64,
}

/// Derives `(L, a, q_max)` from the number of position states `Q`, the
/// spin-orbit strength and the number of cells per side `N`.
pub fn derive_geometry(q_states: usize, lambda: f64, n_cells: usize) -> Result<Geometry> {
    if q_states < 3 || q_states.is_multiple_of(2) {
        return Err(Error::invalid(
            "Q",
            format!("Q must be odd and >= 3, got {q_states}"),
        ));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(
            "lambda",
            format!("lambda must be positive, got {lambda}"),
        ));
    }
    if n_cells < 2 || n_cells % 2 == 1 {
        return Err(Error::invalid(
            "N",
            format!("N must be even and >= 2, got {n_cells}"),
        ));
    }
    let length = (2.0 * PI * (q_states - 1) as f64 / lambda).sqrt();
    Ok(Geometry {
        length,
        lattice_constant: length / n_cells as f64,
        q_max: ((q_states - 1) / 2) as i64,
    })
}

/// All inputs of a simulation, in atomic units (`ħ = 1`).
///
/// `Default` gives the strong-potential parameter set used for the reference
/// band structure: `m = e = λ = 1`, `Ux = Uy = 1000`, `N = 10`, `Q = 101`,
/// `J = 201`, spin up, zero field.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub mass: f64,
    pub charge: f64,
    pub lambda: f64,
    pub ux: f64,
    pub uy: f64,
    pub efield: f64,
    /// Cells per lattice side, `N`.
    pub n_cells: usize,
    /// Number of position states, `Q`.
    pub q_states: usize,
    /// Number of momentum states, `J`.
    pub j_states: usize,
    pub spin: Spin,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            mass: 1.0,
            charge: 1.0,
            lambda: 1.0,
            ux: 1000.0,
            uy: 1000.0,
            efield: 0.0,
            n_cells: 10,
            q_states: 101,
            j_states: 201,
            spin: Spin::Up,
        }
    }
}

/// Outcome of [`ModelParams::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    /// Matrix dimension `Q * J`.
    pub dim: usize,
    /// Bytes needed to hold one dense `D x D` matrix of `f64`.
    pub dense_matrix_bytes: u128,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ModelParams {
    /// Desk-scale parameters: small enough for dense diagonalization in
    /// milliseconds.
    pub fn desk(q_states: usize, j_states: usize, n_cells: usize) -> Self {
        ModelParams {
            ux: 10.0,
            uy: 10.0,
            n_cells,
            q_states,
            j_states,
            ..ModelParams::default()
        }
    }

    pub fn with_efield(&self, efield: f64) -> Self {
        ModelParams {
            efield,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.q_states.is_multiple_of(2) {
            violations.push("Q must be odd".to_string());
        } else if self.q_states < 3 {
            violations.push("Q must be at least 3".to_string());
        }
        if self.j_states.is_multiple_of(2) {
            violations.push("J must be odd".to_string());
        }
        if self.n_cells % 2 == 1 {
            violations.push("N must be even".to_string());
        } else if self.n_cells == 0 {
            violations.push("N must be positive".to_string());
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            violations.push("m must be positive".to_string());
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            violations.push("lambda must be positive".to_string());
        }
        for (name, value) in [
            ("e", self.charge),
            ("Ux", self.ux),
            ("Uy", self.uy),
            ("Efield", self.efield),
        ] {
            if !value.is_finite() {
                violations.push(format!("{name} must be finite"));
            }
        }
        let dim = self.q_states * self.j_states;
        ValidationReport {
            violations,
            dim,
            dense_matrix_bytes: (dim as u128) * (dim as u128) * 8,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::invalid("params", report.violations.join("; ")))
        }
    }

    /// Geometry of a valid parameter set. Panics on invalid parameters; use
    /// [`derive_geometry`] to get an error instead.
    pub fn geometry(&self) -> Geometry {
        derive_geometry(self.q_states, self.lambda, self.n_cells)
            .expect("geometry requested for invalid parameters")
    }

    pub fn length(&self) -> f64 {
        self.geometry().length
    }

    pub fn lattice_constant(&self) -> f64 {
        self.geometry().lattice_constant
    }

    pub fn q_max(&self) -> i64 {
        ((self.q_states - 1) / 2) as i64
    }

    pub fn n_max(&self) -> i64 {
        ((self.j_states - 1) / 2) as i64
    }

    pub fn dim(&self) -> usize {
        self.q_states * self.j_states
    }

    /// Spacing of the discrete position eigenvalues `y_q = 2π q / (λ L)`.
    pub fn y_step(&self) -> f64 {
        2.0 * PI / (self.lambda * self.length())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_geometry() {
        let g = derive_geometry(101, 1.0, 10).unwrap();
        assert!((g.length - 25.0663).abs() < 5e-5);
        assert!((g.lattice_constant - 2.50663).abs() < 5e-6);
        assert_eq!(g.q_max, 50);
        // printed to one decimal
        assert_eq!(format!("{:.1}", g.length), "25.1");
    }

    #[test]
    fn tiny_geometry() {
        let g = derive_geometry(3, 2.0 * PI, 2).unwrap();
        assert!((g.length - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(g.q_max, 1);
    }

    #[test]
    fn q_max_round_trip() {
        for (q, lambda, n) in [
            (101, 1.0, 10),
            (3, 2.0 * PI, 2),
            (21, 0.37, 6),
            (5, 13.0, 4),
        ] {
            let g = derive_geometry(q, lambda, n).unwrap();
            let back = lambda * g.length * g.length / (4.0 * PI);
            assert!(((back - g.q_max as f64) / g.q_max as f64).abs() < 1e-12);
            assert!((g.lattice_constant * n as f64 - g.length).abs() <= 1e-15 * g.length);
        }
    }

    #[test]
    fn geometry_rejects_bad_input() {
        assert!(derive_geometry(100, 1.0, 10).is_err());
        assert!(derive_geometry(101, 0.0, 10).is_err());
        assert!(derive_geometry(101, -1.0, 10).is_err());
        assert!(derive_geometry(101, 1.0, 9).is_err());
    }

    #[test]
    fn validate_reports() {
        let report = ModelParams::default().validate();
        assert!(report.is_valid());
        assert_eq!(report.dim, 20301);
        assert_eq!(report.dense_matrix_bytes, 20301u128 * 20301 * 8);

        let bad = ModelParams {
            q_states: 100,
            ..ModelParams::default()
        };
        assert!(bad
            .validate()
            .violations
            .contains(&"Q must be odd".to_string()));

        let bad = ModelParams {
            lambda: 0.0,
            ..ModelParams::default()
        };
        assert!(bad
            .validate()
            .violations
            .contains(&"lambda must be positive".to_string()));
    }
}
