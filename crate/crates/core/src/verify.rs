//! Installation self-check: every structural property of the model measured
//! on a given parameter set and compared with its tolerance.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bands::{compute_bands_with, degenerate_clusters, BandOptions, DENSE_LIMIT};
use crate::conductivity::sigma_xy;
use crate::eigensolve::{
    lowest_eigenpairs, lowest_eigenpairs_lanczos, LanczosOptions, DEFAULT_TOL,
};
use crate::error::Result;
use crate::hamiltonian::{
    build, converged_quadrature_element, matrix_element, Basis, BasisIndex, HamiltonianMatrix,
};
use crate::model::{derive_geometry, ModelParams};
use crate::scattering::{reflection_ratio, ScatteringInput};

pub const ORACLE_TOL: f64 = 1e-6;
pub const IMAGINARY_TOL: f64 = 1e-8;
pub const REFLECTION_TOL: f64 = 1e-8;
pub const HELLMANN_FEYNMAN_TOL: f64 = 1e-4;
pub const FIELD_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationEntry {
    pub suite: String,
    pub property: String,
    pub cases: usize,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn get(&self, suite: &str, property: &str) -> Option<&VerificationEntry> {
        self.entries
            .iter()
            .find(|e| e.suite == suite && e.property == property)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,property,deviation,tolerance,pass\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{}\n",
                e.suite, e.property, e.deviation, e.tolerance, e.passed
            ));
        }
        out
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "[{}] {}/{}: deviation {:.3e} (tolerance {:.1e}, {} cases)",
                if e.passed { "PASS" } else { "FAIL" },
                e.suite,
                e.property,
                e.deviation,
                e.tolerance,
                e.cases
            )?;
        }
        let failed = self.entries.iter().filter(|e| !e.passed).count();
        write!(f, "{} checks, {} failed", self.entries.len(), failed)
    }
}

fn entry(
    suite: &str,
    property: &str,
    cases: usize,
    deviation: f64,
    tolerance: f64,
) -> VerificationEntry {
    VerificationEntry {
        suite: suite.to_string(),
        property: property.to_string(),
        cases,
        deviation,
        tolerance,
        passed: deviation.is_finite() && deviation <= tolerance,
    }
}

/// Comparisons of two numbers that should agree to a relative tolerance.
pub fn relative_deviation(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-300)
}

/// States used for element-wise checks: all of them for small bases, a fixed
/// stride otherwise.
fn sample_states(basis: &Basis, limit: usize) -> Vec<BasisIndex> {
    let dim = basis.dim();
    let stride = dim.div_ceil(limit).max(1);
    basis.iter().step_by(stride).collect()
}

fn symmetry_suite(params: &ModelParams) -> Result<Vec<VerificationEntry>> {
    let basis = Basis::new(params);
    let mut worst = 0.0f64;
    let mut cases = 0;
    let grid = crate::bands::k_grid(params)?;
    if params.dim() <= DENSE_LIMIT {
        for &k in &grid {
            worst = worst.max(build(params, k)?.max_asymmetry());
            cases += 1;
        }
    } else {
        let states = sample_states(&basis, 64);
        for &k in &grid {
            for r in &states {
                for c in &states {
                    let a = matrix_element(params, k, r, c)?;
                    let b = matrix_element(params, k, c, r)?;
                    worst = worst.max((a - b).abs());
                    cases += 1;
                }
            }
        }
    }
    let mut out = vec![entry("hamiltonian", "symmetry", cases, worst, 0.0)];

    // (n,q) -> (-n,-q) together with k -> -k at zero field
    let zero = params.with_efield(0.0);
    let states = sample_states(&basis, 40);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &k in &grid {
        for r in &states {
            let rr = basis.index(-r.n, -r.q)?;
            for c in &states {
                let cc = basis.index(-c.n, -c.q)?;
                let a = matrix_element(&zero, k, r, c)?;
                let b = matrix_element(&zero, -k, &rr, &cc)?;
                worst = worst.max((a - b).abs() / a.abs().max(1.0));
                cases += 1;
            }
        }
    }
    out.push(entry(
        "hamiltonian",
        "index_reflection",
        cases,
        worst,
        1e-12,
    ));
    Ok(out)
}

fn field_linearity_suite(params: &ModelParams) -> Result<Vec<VerificationEntry>> {
    let (e1, e2) = (params.efield + 1.0, params.efield - 0.5);
    let basis = Basis::new(params);
    let step = params.y_step();
    let k = crate::bands::k_grid(params)?[params.n_cells / 2 + 1];
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    let states = if params.dim() <= DENSE_LIMIT {
        basis.iter().collect::<Vec<_>>()
    } else {
        sample_states(&basis, 64)
    };
    let (p1, p2) = (params.with_efield(e1), params.with_efield(e2));
    for r in &states {
        for c in &states {
            let diff = matrix_element(&p1, k, r, c)? - matrix_element(&p2, k, r, c)?;
            let expected = if r.row == c.row {
                scale = scale.max(matrix_element(&p1, k, r, c)?.abs());
                -params.charge * (e1 - e2) * step * r.q as f64
            } else {
                0.0
            };
            worst = worst.max((diff - expected).abs());
        }
    }
    let tol = 1e-12f64.max(8.0 * f64::EPSILON * scale);
    Ok(vec![entry(
        "hamiltonian",
        "field_linearity",
        states.len() * states.len(),
        worst,
        tol,
    )])
}

fn oracle_suite(params: &ModelParams) -> Result<Vec<VerificationEntry>> {
    let basis = Basis::new(params);
    let states = sample_states(&basis, 121);
    let length = params.length();
    let mut pairs = Vec::new();
    for k in [0.0, 2.0 * PI / length] {
        for r in &states {
            for c in &states {
                pairs.push((k, *r, *c));
            }
        }
    }
    let results: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(k, r, c)| {
            let closed = matrix_element(params, *k, r, c)?;
            let oracle = converged_quadrature_element(params, *k, r, c, 0.1 * ORACLE_TOL)?;
            Ok((relative_deviation(closed, oracle.re()), oracle.im().abs()))
        })
        .collect::<Result<_>>()?;
    let worst_rel = results.iter().fold(0.0f64, |m, r| m.max(r.0));
    let worst_im = results.iter().fold(0.0f64, |m, r| m.max(r.1));
    Ok(vec![
        entry(
            "hamiltonian",
            "oracle_equivalence",
            pairs.len(),
            worst_rel,
            ORACLE_TOL,
        ),
        entry(
            "hamiltonian",
            "oracle_imaginary",
            pairs.len(),
            worst_im,
            IMAGINARY_TOL,
        ),
    ])
}

fn permuted(h: &HamiltonianMatrix) -> HamiltonianMatrix {
    let d = h.dim();
    // multiplicative stride coprime to d gives a fixed shuffle
    let mut stride = (d as f64 * 0.618).round() as usize | 1;
    while gcd(stride, d) != 1 {
        stride += 2;
    }
    let perm: Vec<usize> = (0..d).map(|i| (i * stride + 3) % d).collect();
    let entries = DMatrix::from_fn(d, d, |r, c| h.entries[(perm[r], perm[c])]);
    HamiltonianMatrix {
        entries,
        ..h.clone()
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn eigensolver_suite(params: &ModelParams, bands: usize) -> Result<Vec<VerificationEntry>> {
    let mut out = Vec::new();
    if params.dim() > DENSE_LIMIT {
        return Ok(out);
    }
    let k = crate::bands::k_grid(params)?[params.n_cells / 2 + 1];
    let h = build(params, k)?;
    let count = bands.min(h.dim());
    let dense = lowest_eigenpairs(&h, count, DEFAULT_TOL)?;
    let worst_res = dense
        .residual_norms
        .iter()
        .fold(0.0f64, |m, r| m.max(*r / dense.norm_estimate));
    out.push(entry(
        "eigensolve",
        "residual",
        count,
        worst_res,
        DEFAULT_TOL,
    ));
    out.push(entry(
        "eigensolve",
        "orthonormality",
        count * count,
        dense.orthonormality_error(),
        1e-10,
    ));

    let shuffled = lowest_eigenpairs(&permuted(&h), count, DEFAULT_TOL)?;
    let worst = dense
        .eigenvalues
        .iter()
        .zip(&shuffled.eigenvalues)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    out.push(entry(
        "eigensolve",
        "permutation_invariance",
        count,
        worst,
        1e-10,
    ));

    let wanted = count.min(3);
    let lanczos = lowest_eigenpairs_lanczos(&h, k, wanted, &LanczosOptions::default())?;
    let worst = dense
        .eigenvalues
        .iter()
        .zip(&lanczos.eigenvalues)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    out.push(entry("eigensolve", "lanczos_vs_dense", wanted, worst, 1e-8));
    Ok(out)
}

fn reflection_suite(params: &ModelParams, bands: usize) -> Result<Vec<VerificationEntry>> {
    let zero = params.with_efield(0.0);
    let data = compute_bands_with(&zero, &BandOptions::new(bands))?;
    let nk = data.kvalues.len();
    let half = params.n_cells / 2;
    let mut worst_e = 0.0f64;
    let mut worst_edge = 0.0f64;
    let mut worst_px = 0.0f64;
    let mut cases = 0;
    for i in 0..nk {
        let j = nk - 1 - i;
        let interior = data.l_values[i].unsigned_abs() as usize != half;
        for b in 0..data.band_count() {
            let de = (data.energies[b][i] - data.energies[b][j]).abs();
            if interior {
                worst_e = worst_e.max(de);
                worst_px = worst_px.max((data.px_mean[b][i] + data.px_mean[b][j]).abs());
                cases += 1;
            } else {
                worst_edge = worst_edge.max(de);
            }
        }
    }
    let px_scale = data.px_mean.iter().flatten().map(|v| v.abs()).sum::<f64>()
        / (nk * data.band_count()) as f64;
    let pi_residual = data
        .band_momentum_sum
        .iter()
        .fold(0.0f64, |m, p| m.max(p.abs()));

    let mut out = vec![
        entry(
            "bands",
            "spectral_reflection",
            cases,
            worst_e,
            REFLECTION_TOL,
        ),
        entry(
            "bands",
            "spectral_reflection_edge",
            2 * data.band_count(),
            worst_edge,
            REFLECTION_TOL,
        ),
        entry("bands", "px_antisymmetry", cases, worst_px, REFLECTION_TOL),
        entry(
            "bands",
            "pi_zero_field_residual",
            data.band_count(),
            pi_residual,
            1e-4 * px_scale.max(f64::MIN_POSITIVE),
        ),
    ];

    // filling one more band adds exactly its momentum sum
    let means = &data.band_mean_energy;
    let mut worst_add = 0.0f64;
    let mut previous = 0.0;
    let mut checked = 0;
    for b in 0..means.len().saturating_sub(1) {
        if means[b + 1] - means[b] <= 1e-6 {
            break;
        }
        let sigma = sigma_xy(&data, 0.5 * (means[b] + means[b + 1]))?.sigma_over_alpha;
        worst_add = worst_add.max((sigma - previous - data.band_momentum_sum[b]).abs());
        previous = sigma;
        checked += 1;
    }
    out.push(entry(
        "conductivity",
        "band_additivity",
        checked,
        worst_add,
        1e-12,
    ));
    Ok(out)
}

/// Field at which the Hellmann-Feynman identity is checked: the configured
/// field, or 0.5 when that is zero (zero field hosts near-degenerate pairs).
pub fn hellmann_feynman_field(params: &ModelParams) -> f64 {
    if params.efield != 0.0 {
        params.efield
    } else {
        0.5
    }
}

/// Worst relative deviation between `dε/dE` by centered differences and
/// `-e ⟨y⟩` over all bands and k-points.
pub fn hellmann_feynman_deviation(params: &ModelParams, bands: usize) -> Result<(usize, f64)> {
    let base = hellmann_feynman_field(params);
    let options = BandOptions::new(bands);
    let center = compute_bands_with(&params.with_efield(base), &options)?;
    let plus = compute_bands_with(&params.with_efield(base + FIELD_STEP), &options)?;
    let minus = compute_bands_with(&params.with_efield(base - FIELD_STEP), &options)?;
    let floor = params.charge.abs() * params.y_step();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for ik in 0..center.kvalues.len() {
        let column: Vec<f64> = (0..bands).map(|b| center.energies[b][ik]).collect();
        for range in degenerate_clusters(&column) {
            // the last band may belong to a cluster cut off by truncation
            if range.end == bands && range.len() > 1 {
                continue;
            }
            for b in range {
                let fd = (plus.energies[b][ik] - minus.energies[b][ik]) / (2.0 * FIELD_STEP);
                let hf = -params.charge * center.y_mean[b][ik];
                worst = worst.max((fd - hf).abs() / hf.abs().max(floor));
                cases += 1;
            }
        }
    }
    Ok((cases, worst))
}

fn hellmann_feynman_suite(params: &ModelParams, bands: usize) -> Result<Vec<VerificationEntry>> {
    let (cases, worst) = hellmann_feynman_deviation(params, bands)?;
    Ok(vec![entry(
        "bands",
        "hellmann_feynman",
        cases,
        worst,
        HELLMANN_FEYNMAN_TOL,
    )])
}

fn scalar_suite(params: &ModelParams) -> Result<Vec<VerificationEntry>> {
    let geometry = derive_geometry(params.q_states, params.lambda, params.n_cells)?;
    let back = params.lambda * geometry.length * geometry.length / (4.0 * PI);
    let mut out = vec![entry(
        "model",
        "q_max_round_trip",
        1,
        relative_deviation(back, geometry.q_max as f64),
        1e-12,
    )];
    let worst = [1.0, 1e3, 1e6]
        .iter()
        .map(|&u| {
            reflection_ratio(&ScatteringInput {
                strength: u,
                theta: PI,
                kwave: 1.0,
                mass: params.mass,
            })
            .map(|r| r.norm())
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::max);
    out.push(entry("scattering", "no_backscatter_at_pi", 3, worst, 1e-12));
    Ok(out)
}

pub fn run_verification(params: &ModelParams, level: Level) -> Result<VerificationReport> {
    run_verification_with(params, level, 6)
}

pub fn run_verification_with(
    params: &ModelParams,
    level: Level,
    bands: usize,
) -> Result<VerificationReport> {
    params.ensure_valid()?;
    let bands = bands.min(params.dim());
    type Suite<'a> = Box<dyn Fn() -> Result<Vec<VerificationEntry>> + Send + Sync + 'a>;
    let mut suites: Vec<(&str, Suite)> = vec![
        ("bands", Box::new(|| reflection_suite(params, bands))),
        ("eigensolve", Box::new(|| eigensolver_suite(params, bands))),
        (
            "hellmann_feynman",
            Box::new(|| hellmann_feynman_suite(params, bands)),
        ),
        ("linearity", Box::new(|| field_linearity_suite(params))),
        ("scalar", Box::new(|| scalar_suite(params))),
        ("symmetry", Box::new(|| symmetry_suite(params))),
    ];
    if level == Level::Quick {
        suites.push(("oracle", Box::new(|| oracle_suite(params))));
    }
    let results: Vec<Vec<VerificationEntry>> = suites
        .par_iter()
        .map(|(_, run)| run())
        .collect::<Result<_>>()?;
    let mut entries: Vec<VerificationEntry> = results.into_iter().flatten().collect();
    entries.sort_by(|a, b| (&a.suite, &a.property).cmp(&(&b.suite, &b.property)));
    Ok(VerificationReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_a_bijection() {
        let params = ModelParams::desk(3, 5, 2);
        let h = build(&params, 0.1).unwrap();
        let p = permuted(&h);
        let mut a: Vec<f64> = h.entries.iter().copied().collect();
        let mut b: Vec<f64> = p.entries.iter().copied().collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn quick_report_on_tiny_basis() {
        let params = ModelParams::desk(5, 5, 2);
        let report = run_verification(&params, Level::Quick).unwrap();
        assert!(report.passed(), "{report}");
        assert!(report.get("hamiltonian", "oracle_equivalence").is_some());
        assert!(report
            .to_csv()
            .starts_with("suite,property,deviation,tolerance,pass\n"));
    }
}
