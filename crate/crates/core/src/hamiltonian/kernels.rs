use std::f64::consts::PI;

fn alternating_sign(d: i64) -> f64 {
    if d % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Fourier coefficient kernel of `x²` on one cell: `π²/6` on the diagonal,
/// `(-1)^(n-n')/(n-n')²` elsewhere. Symmetric.
pub fn f_kernel(n: i64, n2: i64) -> f64 {
    let d = n - n2;
    if d == 0 {
        PI * PI / 6.0
    } else {
        alternating_sign(d) / (d * d) as f64
    }
}

/// Fourier coefficient kernel of `x` on one cell: zero on the diagonal,
/// `(-1)^(n-n')/(n-n')` elsewhere. Antisymmetric.
pub fn g_kernel(n: i64, n2: i64) -> f64 {
    let d = n - n2;
    if d == 0 {
        0.0
    } else {
        alternating_sign(d) / d as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_values() {
        assert_eq!(f_kernel(3, 3), PI * PI / 6.0);
        assert!((f_kernel(3, 3) - 1.644934).abs() < 1e-6);
        assert_eq!(f_kernel(2, 4), 0.25);
        assert_eq!(f_kernel(0, 1), -1.0);
        assert_eq!(g_kernel(5, 5), 0.0);
        assert_eq!(g_kernel(1, 2), 1.0);
        assert_eq!(g_kernel(2, 1), -1.0);
    }

    #[test]
    fn symmetry_over_window() {
        for n in -20..=20 {
            for n2 in -20..=20 {
                assert_eq!(f_kernel(n, n2), f_kernel(n2, n));
                assert_eq!(g_kernel(n, n2), -g_kernel(n2, n));
            }
        }
    }
}
