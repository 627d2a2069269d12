//! Energies and momentum expectations on the quantized k-grid.
//!
//! Allowed wavenumbers are `k_l = 2π l / L` for `l = -N/2 ..= N/2`; both
//! zone endpoints are kept by default so that band sums run over `N + 1`
//! points. Bands are labelled by ascending energy at each k.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::eigensolve::{
    lowest_eigenpairs, lowest_eigenpairs_lanczos, EigenResult, LanczosOptions, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{build, Basis, ToeplitzHamiltonian};
use crate::model::ModelParams;

/// Eigenvalues closer than this (relative to `max(1, |ε|)`) form a
/// degenerate cluster whose expectation values are averaged.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Largest dimension diagonalized densely under [`SolverChoice::Auto`].
pub const DENSE_LIMIT: usize = 3000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolverChoice {
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandOptions {
    pub bands: usize,
    pub solver: SolverChoice,
    pub tol: f64,
    /// Exclude `l = -N/2`, which duplicates `l = N/2` up to a reciprocal
    /// lattice shift.
    pub drop_duplicate_edge: bool,
}

impl BandOptions {
    pub fn new(bands: usize) -> Self {
        BandOptions {
            bands,
            solver: SolverChoice::Auto,
            tol: DEFAULT_TOL,
            drop_duplicate_edge: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandData {
    pub params: ModelParams,
    /// Integer labels `l` of the grid points.
    pub l_values: Vec<i64>,
    pub kvalues: Vec<f64>,
    /// `energies[band][k]`.
    pub energies: Vec<Vec<f64>>,
    /// `⟨p_x⟩` per band and k, cluster-averaged inside degeneracies.
    pub px_mean: Vec<Vec<f64>>,
    /// `⟨y⟩` per band and k, cluster-averaged inside degeneracies.
    pub y_mean: Vec<Vec<f64>>,
    pub band_mean_energy: Vec<f64>,
    /// Per-band momentum sum `Π = Σ_k ⟨p_x⟩_k`.
    pub band_momentum_sum: Vec<f64>,
    /// Number of degenerate clusters encountered over the whole grid.
    pub degenerate_clusters: usize,
}

impl BandData {
    pub fn band_count(&self) -> usize {
        self.energies.len()
    }

    /// Largest `max_k ε - min_k ε` over all bands.
    pub fn max_band_width(&self) -> f64 {
        self.energies
            .iter()
            .map(|row| {
                let lo = row.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

/// Grid labels and wavenumbers, `l` ascending.
pub fn k_grid_points(params: &ModelParams, drop_duplicate_edge: bool) -> Result<Vec<(i64, f64)>> {
    if params.n_cells % 2 == 1 || params.n_cells == 0 {
        return Err(Error::invalid("N", "N must be even and positive"));
    }
    params.ensure_valid()?;
    let half = (params.n_cells / 2) as i64;
    let length = params.length();
    let start = if drop_duplicate_edge {
        -half + 1
    } else {
        -half
    };
    Ok((start..=half)
        .map(|l| (l, 2.0 * PI * l as f64 / length))
        .collect())
}

/// The `N + 1` wavenumbers `2π l / L`, `l = -N/2 ..= N/2`.
pub fn k_grid(params: &ModelParams) -> Result<Vec<f64>> {
    Ok(k_grid_points(params, false)?
        .into_iter()
        .map(|(_, k)| k)
        .collect())
}

fn check_coefficients(params: &ModelParams, coeffs: &[f64]) -> Result<()> {
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if coeffs.len() != params.dim() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized { norm });
    }
    Ok(())
}

/// `⟨p_x⟩_k = k + Σ |c_{n,q}|² 2π j / L`.
pub fn px_mean(k: f64, coeffs: &[f64], params: &ModelParams) -> Result<f64> {
    check_coefficients(params, coeffs)?;
    let basis = Basis::new(params);
    let length = params.length();
    let sum: f64 = basis
        .iter()
        .zip(coeffs)
        .map(|(s, c)| c * c * 2.0 * PI * s.j as f64 / length)
        .sum();
    Ok(k + sum)
}

/// `⟨y⟩ = Σ |c_{n,q}|² 2π q / (λ L)`.
pub fn y_mean(coeffs: &[f64], params: &ModelParams) -> Result<f64> {
    check_coefficients(params, coeffs)?;
    let basis = Basis::new(params);
    let step = params.y_step();
    Ok(basis
        .iter()
        .zip(coeffs)
        .map(|(s, c)| c * c * s.q as f64 * step)
        .sum())
}

/// Index ranges of consecutive eigenvalues within [`DEGENERACY_TOL`].
pub fn degenerate_clusters(eigenvalues: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        let split = i == eigenvalues.len() || {
            let (a, b) = (eigenvalues[i - 1], eigenvalues[i]);
            (b - a).abs() > DEGENERACY_TOL * a.abs().max(b.abs()).max(1.0)
        };
        if split {
            clusters.push(start..i);
            start = i;
        }
    }
    clusters
}

/// Replaces each value by its cluster average; returns how many clusters
/// had more than one member.
fn average_clusters(values: &mut [f64], clusters: &[std::ops::Range<usize>]) -> usize {
    let mut merged = 0;
    for range in clusters.iter().filter(|r| r.len() > 1) {
        let mean = values[range.clone()].iter().sum::<f64>() / range.len() as f64;
        values[range.clone()].iter_mut().for_each(|v| *v = mean);
        merged += 1;
    }
    merged
}

/// Lowest eigenpairs of `H_k` with the requested solver.
pub fn solve_at(params: &ModelParams, k: f64, options: &BandOptions) -> Result<EigenResult> {
    let dense = match options.solver {
        SolverChoice::Dense => true,
        SolverChoice::Lanczos => false,
        SolverChoice::Auto => params.dim() <= DENSE_LIMIT,
    };
    if dense {
        let h = build(params, k)?;
        lowest_eigenpairs(&h, options.bands, options.tol)
    } else {
        let op = ToeplitzHamiltonian::new(params, k)?;
        let lanczos = LanczosOptions {
            tol: options.tol,
            ..LanczosOptions::default()
        };
        lowest_eigenpairs_lanczos(&op, k, options.bands, &lanczos)
    }
}

struct KPointSummary {
    energies: Vec<f64>,
    px: Vec<f64>,
    y: Vec<f64>,
    clusters: usize,
}

fn summarize(params: &ModelParams, result: &EigenResult) -> Result<KPointSummary> {
    let mut px = Vec::with_capacity(result.len());
    let mut y = Vec::with_capacity(result.len());
    for v in &result.eigenvectors {
        px.push(px_mean(result.k, v, params)?);
        y.push(y_mean(v, params)?);
    }
    let clusters = degenerate_clusters(&result.eigenvalues);
    let merged = average_clusters(&mut px, &clusters);
    average_clusters(&mut y, &clusters);
    if merged > 0 {
        log::warn!(
            "{merged} degenerate eigenvalue cluster(s) at k = {}; expectation values averaged",
            result.k
        );
    }
    Ok(KPointSummary {
        energies: result.eigenvalues.clone(),
        px,
        y,
        clusters: merged,
    })
}

pub fn compute_bands(params: &ModelParams, bands: usize) -> Result<BandData> {
    compute_bands_with(params, &BandOptions::new(bands))
}

pub fn compute_bands_with(params: &ModelParams, options: &BandOptions) -> Result<BandData> {
    params.ensure_valid()?;
    if options.bands == 0 {
        return Err(Error::invalid("M", "at least one band"));
    }
    let grid = k_grid_points(params, options.drop_duplicate_edge)?;
    let per_k: Vec<KPointSummary> = grid
        .par_iter()
        .map(|&(_, k)| {
            solve_at(params, k, options)
                .and_then(|r| summarize(params, &r))
                .map_err(|e| Error::AtPoint {
                    efield: params.efield,
                    k,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let nk = grid.len();
    let nb = options.bands;
    let table = |pick: &dyn Fn(&KPointSummary) -> &Vec<f64>| -> Vec<Vec<f64>> {
        (0..nb)
            .map(|b| per_k.iter().map(|s| pick(s)[b]).collect())
            .collect()
    };
    let energies = table(&|s| &s.energies);
    let px = table(&|s| &s.px);
    let y = table(&|s| &s.y);
    let band_mean_energy = energies
        .iter()
        .map(|row| row.iter().sum::<f64>() / nk as f64)
        .collect();
    let band_momentum_sum = px.iter().map(|row| row.iter().sum()).collect();

    Ok(BandData {
        params: params.clone(),
        l_values: grid.iter().map(|&(l, _)| l).collect(),
        kvalues: grid.iter().map(|&(_, k)| k).collect(),
        energies,
        px_mean: px,
        y_mean: y,
        band_mean_energy,
        band_momentum_sum,
        degenerate_clusters: per_k.iter().map(|s| s.clusters).sum(),
    })
}
