//! One-dimensional spin-flip scattering off a non-magnetic delta obstacle.
//!
//! A spin-up wave hitting `U (e^{iθσ₁/2} + e^{-iθσ₁/2}) δ(x)` can only be
//! reflected into spin down. Matching the derivative jump at the origin gives
//! `V (-ik/m + 2U cos(θ/2)) + 2U A cos(θ/2) = 0`, so backscattering vanishes
//! exactly at `θ = π`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringInput {
    pub strength: f64,
    pub theta: f64,
    pub kwave: f64,
    pub mass: f64,
}

impl ScatteringInput {
    fn check(&self) -> Result<()> {
        if !(self.kwave > 0.0) {
            return Err(Error::invalid(
                "kwave",
                "incident wavenumber must be positive",
            ));
        }
        if !(self.mass > 0.0) {
            return Err(Error::invalid("m", "mass must be positive"));
        }
        if !self.strength.is_finite() || !self.theta.is_finite() {
            return Err(Error::invalid("U", "strength and angle must be finite"));
        }
        Ok(())
    }
}

/// `cos(θ/2)` written as `sin((π - θ)/2)` so that `θ = π` gives exactly 0.
fn half_angle_cos(theta: f64) -> f64 {
    (0.5 * (PI - theta)).sin()
}

/// Reflected-to-incident amplitude ratio `V / A`.
pub fn reflection_ratio(input: &ScatteringInput) -> Result<Complex64> {
    input.check()?;
    let coupling = 2.0 * input.strength * half_angle_cos(input.theta);
    Ok(Complex64::new(coupling, 0.0) / Complex64::new(-coupling, input.kwave / input.mass))
}

/// `|V / A|²`.
pub fn reflection_probability(input: &ScatteringInput) -> Result<f64> {
    Ok(reflection_ratio(input)?.norm_sqr())
}

/// `count` evenly spaced angles on `[0, π]` with their ratios.
pub fn theta_sweep(base: &ScatteringInput, count: usize) -> Result<Vec<(f64, Complex64)>> {
    if count < 2 {
        return Err(Error::invalid("theta_count", "at least two angles"));
    }
    (0..count)
        .map(|i| {
            let theta = if i + 1 == count {
                PI
            } else {
                PI * i as f64 / (count - 1) as f64
            };
            let ratio = reflection_ratio(&ScatteringInput { theta, ..*base })?;
            Ok((theta, ratio))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(strength: f64, theta: f64) -> ScatteringInput {
        ScatteringInput {
            strength,
            theta,
            kwave: 1.0,
            mass: 1.0,
        }
    }

    #[test]
    fn perfect_transmission_at_pi() {
        for u in [1.0, 1e3, 1e6] {
            assert!(reflection_ratio(&input(u, PI)).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn no_obstacle() {
        assert_eq!(reflection_ratio(&input(0.0, 0.3)).unwrap().norm(), 0.0);
    }

    #[test]
    fn strong_obstacle_reflects_fully() {
        let r = reflection_ratio(&input(1e6, 0.0)).unwrap();
        assert!((r.norm() - 1.0).abs() < 1e-6);
        assert!(r.norm() < 1.0);
    }

    #[test]
    fn satisfies_matching_condition() {
        let inp = ScatteringInput {
            strength: 2.5,
            theta: 1.1,
            kwave: 0.7,
            mass: 1.3,
        };
        let v = reflection_ratio(&inp).unwrap();
        let c = 2.0 * inp.strength * (inp.theta / 2.0).cos();
        let lhs = v * Complex64::new(c, -inp.kwave / inp.mass) + c;
        assert!(lhs.norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(reflection_ratio(&ScatteringInput {
            kwave: 0.0,
            ..input(1.0, 0.0)
        })
        .is_err());
        assert!(reflection_ratio(&ScatteringInput {
            mass: -1.0,
            ..input(1.0, 0.0)
        })
        .is_err());
    }

    #[test]
    fn sweep_endpoints() {
        let s = theta_sweep(&input(10.0, 0.0), 5).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0].0, 0.0);
        assert_eq!(s[4].0, PI);
        assert_eq!(s[4].1.norm(), 0.0);
    }
}
