//! Transverse conductivity from band momentum sums.
//!
//! At zero temperature `σ_xy / α = Σ Π_band` over the bands whose mean
//! energy lies below the Fermi level. Sweeping the field produces a
//! staircase; [`estimate_sigma0`] recovers the step unit from the plateaus.

use rayon::prelude::*;

use crate::bands::{compute_bands_with, BandData, BandOptions};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Band means this close to the Fermi level count as ties and are excluded.
pub const TIE_TOL: f64 = 1e-9;
/// Maximal relative variation inside one plateau.
pub const PLATEAU_TOL: f64 = 0.01;
/// Allowed distance of a plateau level from an integer multiple of the unit,
/// as a fraction of the unit.
pub const QUANTIZATION_TOL: f64 = 0.05;
/// Largest divisor tried when searching for the unit.
const MAX_DIVISOR: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaValue {
    pub sigma_over_alpha: f64,
    pub bands_included: usize,
}

/// `σ_xy / α` for one Fermi level.
pub fn sigma_xy(bands: &BandData, fermi_level: f64) -> Result<SigmaValue> {
    let highest = bands
        .band_mean_energy
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !(highest > fermi_level) {
        return Err(Error::InsufficientBands {
            fermi_level,
            highest,
        });
    }
    let mut sigma = 0.0;
    let mut included = 0;
    for (b, (&mean, &pi)) in bands
        .band_mean_energy
        .iter()
        .zip(&bands.band_momentum_sum)
        .enumerate()
    {
        if (mean - fermi_level).abs() <= TIE_TOL * fermi_level.abs().max(1.0) {
            log::warn!("band {b} mean {mean} ties the Fermi level {fermi_level}; excluded");
            continue;
        }
        if mean < fermi_level {
            sigma += pi;
            included += 1;
        }
    }
    Ok(SigmaValue {
        sigma_over_alpha: sigma,
        bands_included: included,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConductivityCurve {
    pub fermi_level: f64,
    pub efield_values: Vec<f64>,
    pub sigma_over_alpha: Vec<f64>,
    pub bands_included: Vec<usize>,
    pub sigma0_over_alpha: Option<f64>,
    pub integer_steps: Option<Vec<i64>>,
    pub jump_locations: Vec<f64>,
}

impl ConductivityCurve {
    /// `σ(E → 0⁺)` from a linear fit through the three smallest positive
    /// fields; `None` with fewer than three of them.
    pub fn zero_field_limit(&self) -> Option<f64> {
        let mut points: Vec<(f64, f64)> = self
            .efield_values
            .iter()
            .zip(&self.sigma_over_alpha)
            .filter(|(e, _)| **e > 0.0)
            .map(|(e, s)| (*e, *s))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        linear_intercept(points.get(..3)?)
    }

    /// `σ` at exactly zero field, when the grid contains it.
    pub fn at_zero_field(&self) -> Option<f64> {
        self.efield_values
            .iter()
            .position(|&e| e == 0.0)
            .map(|i| self.sigma_over_alpha[i])
    }
}

fn linear_intercept(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(my - sxy / sxx * mx)
}

/// Grid fields `E_i` (i ≥ 1) where `σ_i` differs from `σ_{i-1}` by more than
/// [`PLATEAU_TOL`] relative (absolute floor `1e-6`).
pub fn jump_locations(efields: &[f64], sigma: &[f64]) -> Vec<f64> {
    (1..sigma.len())
        .filter(|&i| {
            let scale = sigma[i].abs().max(sigma[i - 1].abs());
            (sigma[i] - sigma[i - 1]).abs() > (PLATEAU_TOL * scale).max(1e-6)
        })
        .map(|i| efields[i])
        .collect()
}

/// Grid fields `E_i` where some band mean changed side of the Fermi level
/// between `E_{i-1}` and `E_i`.
pub fn band_crossings(efields: &[f64], band_means: &[Vec<f64>], fermi_level: f64) -> Vec<f64> {
    (1..efields.len())
        .filter(|&i| {
            band_means[i - 1]
                .iter()
                .zip(&band_means[i])
                .any(|(a, b)| (*a < fermi_level) != (*b < fermi_level))
        })
        .map(|i| efields[i])
        .collect()
}

/// Result of a field sweep: one curve per Fermi level plus the per-field
/// band summaries the curves were computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub efields: Vec<f64>,
    pub curves: Vec<ConductivityCurve>,
    /// `band_means[i][b]` at `efields[i]`.
    pub band_means: Vec<Vec<f64>>,
    /// `band_momentum_sums[i][b]` at `efields[i]`.
    pub band_momentum_sums: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn crossings(&self, fermi_level: f64) -> Vec<f64> {
        band_crossings(&self.efields, &self.band_means, fermi_level)
    }
}

pub fn sweep(
    params: &ModelParams,
    efields: &[f64],
    fermi_levels: &[f64],
    options: &BandOptions,
) -> Result<SweepResult> {
    if efields.is_empty() {
        return Err(Error::invalid("efields", "at least one field value"));
    }
    if efields.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(
            "efields",
            "field values must be strictly ascending",
        ));
    }
    let per_field: Vec<BandData> = efields
        .par_iter()
        .map(|&e| compute_bands_with(&params.with_efield(e), options))
        .collect::<Result<_>>()?;

    let mut curves = Vec::with_capacity(fermi_levels.len());
    for &fermi in fermi_levels {
        let values: Vec<SigmaValue> = per_field
            .iter()
            .map(|b| sigma_xy(b, fermi))
            .collect::<Result<_>>()?;
        let sigma: Vec<f64> = values.iter().map(|v| v.sigma_over_alpha).collect();
        curves.push(ConductivityCurve {
            fermi_level: fermi,
            efield_values: efields.to_vec(),
            jump_locations: jump_locations(efields, &sigma),
            bands_included: values.iter().map(|v| v.bands_included).collect(),
            sigma_over_alpha: sigma,
            sigma0_over_alpha: None,
            integer_steps: None,
        });
    }
    Ok(SweepResult {
        efields: efields.to_vec(),
        curves,
        band_means: per_field
            .iter()
            .map(|b| b.band_mean_energy.clone())
            .collect(),
        band_momentum_sums: per_field
            .iter()
            .map(|b| b.band_momentum_sum.clone())
            .collect(),
    })
}

/// A maximal run of grid points with nearly constant conductivity.
#[derive(Clone, Debug, PartialEq)]
pub struct Plateau {
    pub curve: usize,
    /// Grid indices `start..end`.
    pub start: usize,
    pub end: usize,
    pub level: f64,
}

/// Splits a curve into maximal runs whose spread stays within
/// [`PLATEAU_TOL`] of the largest magnitude in the run (absolute floor
/// `abs_floor`). Runs of a single point are transitions, not plateaus.
pub fn find_plateaus(sigma: &[f64], abs_floor: f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < sigma.len() {
        let (mut lo, mut hi) = (sigma[start], sigma[start]);
        let mut end = start + 1;
        while end < sigma.len() {
            let (nlo, nhi) = (lo.min(sigma[end]), hi.max(sigma[end]));
            let scale = nlo.abs().max(nhi.abs());
            if nhi - nlo > (PLATEAU_TOL * scale).max(abs_floor) {
                break;
            }
            lo = nlo;
            hi = nhi;
            end += 1;
        }
        if end - start >= 2 {
            let level = sigma[start..end].iter().sum::<f64>() / (end - start) as f64;
            out.push((start, end, level));
        }
        start = end;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sigma0Estimate {
    /// Quantization unit `σ₀ / α`.
    pub unit: f64,
    pub plateaus: Vec<Plateau>,
    /// Integer multiple assigned to each plateau, aligned with `plateaus`.
    pub assignments: Vec<i64>,
    /// Worst `|level - n u| / u` over all plateaus.
    pub residual: f64,
}

impl Sigma0Estimate {
    /// Per-point integers for `curve`; points outside plateaus get the
    /// nearest multiple.
    pub fn steps_for(&self, curve_index: usize, curve: &ConductivityCurve) -> Vec<i64> {
        let mut steps: Vec<i64> = curve
            .sigma_over_alpha
            .iter()
            .map(|s| (s / self.unit).round() as i64)
            .collect();
        for (p, &n) in self.plateaus.iter().zip(&self.assignments) {
            if p.curve == curve_index {
                steps[p.start..p.end].iter_mut().for_each(|s| *s = n);
            }
        }
        steps
    }

    /// Stores unit and per-point steps on every curve.
    pub fn annotate(&self, curves: &mut [ConductivityCurve]) {
        for (i, curve) in curves.iter_mut().enumerate() {
            curve.integer_steps = Some(self.steps_for(i, curve));
            curve.sigma0_over_alpha = Some(self.unit);
        }
    }
}

fn fit_unit(levels: &[f64], unit: f64) -> Option<(Vec<i64>, f64)> {
    let mut assignments = Vec::with_capacity(levels.len());
    let mut worst = 0.0f64;
    for &level in levels {
        let n = (level / unit).round();
        if n == 0.0 {
            return None;
        }
        let dev = (level - n * unit).abs() / unit;
        if dev > QUANTIZATION_TOL {
            return None;
        }
        worst = worst.max(dev);
        assignments.push(n as i64);
    }
    Some((assignments, worst))
}

/// Alternates nearest-integer assignment and a least-squares unit until the
/// assignment is stable, so that a candidate taken from one noisy level does
/// not decide the fit alone.
fn refine_unit(levels: &[f64], mut unit: f64) -> Option<f64> {
    let mut previous: Vec<i64> = Vec::new();
    for _ in 0..8 {
        let assign: Vec<i64> = levels.iter().map(|l| (l / unit).round() as i64).collect();
        if assign.contains(&0) {
            return None;
        }
        if assign == previous {
            break;
        }
        let num: f64 = assign.iter().zip(levels).map(|(&n, l)| n as f64 * l).sum();
        let den: f64 = assign.iter().map(|&n| (n * n) as f64).sum();
        unit = num / den;
        previous = assign;
    }
    Some(unit)
}

/// Recovers the conductivity quantum from plateau levels of all curves.
///
/// Candidate units are `|level| / r` for every nonzero plateau level and
/// `r = 1..=24`, each refined by least squares over its integer assignment;
/// the largest refined unit that puts every nonzero level within
/// [`QUANTIZATION_TOL`] of an integer multiple wins.
pub fn estimate_sigma0(curves: &[ConductivityCurve]) -> Result<Sigma0Estimate> {
    let scale = curves
        .iter()
        .flat_map(|c| c.sigma_over_alpha.iter())
        .fold(0.0f64, |m, s| m.max(s.abs()));
    let zero_floor = 1e-3 * scale.max(f64::MIN_POSITIVE);
    let mut plateaus = Vec::new();
    for (i, curve) in curves.iter().enumerate() {
        for (start, end, level) in find_plateaus(&curve.sigma_over_alpha, 1e-6 * scale) {
            if level.abs() > zero_floor {
                plateaus.push(Plateau {
                    curve: i,
                    start,
                    end,
                    level,
                });
            }
        }
    }
    if plateaus.is_empty() {
        return Err(Error::NoPlateau);
    }
    let levels: Vec<f64> = plateaus.iter().map(|p| p.level).collect();

    let mut fits: Vec<(f64, Vec<i64>, f64)> = Vec::new();
    for &level in &levels {
        for r in 1..=MAX_DIVISOR {
            if let Some(refined) = refine_unit(&levels, level.abs() / r as f64) {
                if let Some((assign, residual)) = fit_unit(&levels, refined) {
                    fits.push((refined, assign, residual));
                }
            }
        }
    }
    fits.sort_by(|a, b| b.0.total_cmp(&a.0));
    let Some((unit, assignments, residual)) = fits.first().cloned() else {
        return Err(Error::NoPlateau);
    };
    if let Some(rival) = fits
        .iter()
        .find(|f| f.0 > 0.75 * unit && f.1 != assignments)
    {
        return Err(Error::AmbiguousUnit {
            first: unit,
            second: rival.0,
        });
    }
    Ok(Sigma0Estimate {
        unit,
        plateaus,
        assignments,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_bands(means: &[f64], pis: &[f64]) -> BandData {
        BandData {
            params: ModelParams::desk(5, 5, 2),
            l_values: vec![-1, 0, 1],
            kvalues: vec![-1.0, 0.0, 1.0],
            energies: means.iter().map(|&m| vec![m; 3]).collect(),
            px_mean: pis.iter().map(|&p| vec![p / 3.0; 3]).collect(),
            y_mean: means.iter().map(|_| vec![0.0; 3]).collect(),
            band_mean_energy: means.to_vec(),
            band_momentum_sum: pis.to_vec(),
            degenerate_clusters: 0,
        }
    }

    fn curve(sigma: Vec<f64>) -> ConductivityCurve {
        ConductivityCurve {
            fermi_level: 0.0,
            efield_values: (0..sigma.len()).map(|i| i as f64).collect(),
            bands_included: vec![0; sigma.len()],
            jump_locations: Vec::new(),
            sigma_over_alpha: sigma,
            sigma0_over_alpha: None,
            integer_steps: None,
        }
    }

    #[test]
    fn sigma_counts_bands_below() {
        let bands = synthetic_bands(&[-3.0, -2.0, -1.0], &[1.5, -0.5, 2.0]);
        assert_eq!(sigma_xy(&bands, -10.0).unwrap().sigma_over_alpha, 0.0);
        let v = sigma_xy(&bands, -1.5).unwrap();
        assert_eq!(v.sigma_over_alpha, 1.0);
        assert_eq!(v.bands_included, 2);
        assert!(matches!(
            sigma_xy(&bands, 0.0),
            Err(Error::InsufficientBands { .. })
        ));
        // tie excluded
        assert_eq!(sigma_xy(&bands, -2.0).unwrap().bands_included, 1);
    }

    #[test]
    fn additivity_and_monotone_filling() {
        let bands = synthetic_bands(&[-3.0, -2.0, -1.0, 0.5], &[1.5, -0.5, 2.0, 7.0]);
        let mut previous = 0;
        for (b, fermi) in [-2.5, -1.5, 0.0].iter().enumerate() {
            let v = sigma_xy(&bands, *fermi).unwrap();
            assert!(v.bands_included >= previous);
            previous = v.bands_included;
            let lower = if b == 0 {
                0.0
            } else {
                sigma_xy(&bands, [-2.5, -1.5, 0.0][b - 1])
                    .unwrap()
                    .sigma_over_alpha
            };
            assert_eq!(v.sigma_over_alpha, lower + bands.band_momentum_sum[b]);
        }
    }

    #[test]
    fn unit_from_three_levels() {
        let curves = vec![curve(vec![13.8, 13.8, 27.5, 27.5, 41.3, 41.3])];
        let est = estimate_sigma0(&curves).unwrap();
        assert!((est.unit - 192.7 / 14.0).abs() < 1e-12);
        assert!((est.unit - 13.77).abs() < 0.01);
        assert_eq!(est.assignments, vec![1, 2, 3]);
        assert!(est.residual < 0.05);
    }

    #[test]
    fn unit_needs_all_levels() {
        // no single level divided by its integer fits the other two within 5%
        let curves = vec![curve(vec![
            0.0, 0.0, 1.0077, 1.0077, 3.0275, 3.0275, 3.9632, 3.9632,
        ])];
        let est = estimate_sigma0(&curves).unwrap();
        assert_eq!(est.assignments, vec![1, 3, 4]);
        assert!((est.unit - 1.0).abs() < 0.01);
    }

    #[test]
    fn zero_only_is_not_a_plateau() {
        let curves = vec![curve(vec![0.0; 5])];
        assert!(matches!(estimate_sigma0(&curves), Err(Error::NoPlateau)));
    }

    #[test]
    fn odd_multiples_keep_the_unit() {
        let curves = vec![curve(vec![7.0, 7.0, 21.0, 21.0, 35.0, 35.0, -7.0, -7.0])];
        let est = estimate_sigma0(&curves).unwrap();
        assert!((est.unit - 7.0).abs() < 1e-12);
        assert_eq!(est.assignments, vec![1, 3, 5, -1]);
    }

    #[test]
    fn jumps_and_crossings() {
        let efields = [0.0, 1.0, 2.0, 3.0];
        let sigma = [0.0, 5.0, 5.01, 9.0];
        assert_eq!(jump_locations(&efields, &sigma), vec![1.0, 3.0]);
        let means = vec![
            vec![-1.0, 2.0],
            vec![-2.0, 0.5],
            vec![-3.0, 0.2],
            vec![-4.0, -0.1],
        ];
        assert_eq!(band_crossings(&efields, &means, 0.0), vec![3.0]);
    }

    #[test]
    fn zero_field_extrapolation() {
        let mut c = curve(vec![0.0, 5.1, 5.2, 5.3, 9.0]);
        c.efield_values = vec![0.0, 0.1, 0.2, 0.3, 0.4];
        assert!((c.zero_field_limit().unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(c.at_zero_field(), Some(0.0));
    }

    #[test]
    fn plateau_splitting() {
        let runs = find_plateaus(&[1.0, 1.005, 3.0, 5.0, 5.0, 5.02], 1e-9);
        assert_eq!(runs.len(), 2);
        assert_eq!((runs[0].0, runs[0].1), (0, 2));
        assert_eq!((runs[1].0, runs[1].1), (3, 6));
    }
}
