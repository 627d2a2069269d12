//! Run orchestration and CSV output.
//!
//! Every float is written with 17 significant digits so reruns diff cleanly.
//! Files are written to a temporary name and renamed into place; on failure
//! everything this run produced is removed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::bands::{compute_bands_with, BandData, BandOptions};
use crate::conductivity::{estimate_sigma0, sweep, SweepResult};
use crate::config::{Mode, RunConfig};
use crate::error::{Error, Result};
use crate::hamiltonian::{build, write_matrix_dump};
use crate::scattering::{theta_sweep, ScatteringInput};
use crate::verify::run_verification_with;

/// Round-trip exact formatting for `f64`.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Tracks files written by one run so a failure can remove them.
struct OutputSet {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSet {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn discard(self) {
        for path in self.written {
            let _ = fs::remove_file(path);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub manifest: String,
    /// False when a verify run found failing properties.
    pub passed: bool,
    /// Human-readable verification table for verify runs.
    pub report: Option<String>,
}

pub fn bands_csv(data: &BandData) -> String {
    let mut out = String::from("band,l,k,energy,px_mean\n");
    for b in 0..data.band_count() {
        for (ik, (&l, &k)) in data.l_values.iter().zip(&data.kvalues).enumerate() {
            let _ = writeln!(
                out,
                "{b},{l},{},{},{}",
                fmt_f64(k),
                fmt_f64(data.energies[b][ik]),
                fmt_f64(data.px_mean[b][ik])
            );
        }
    }
    out
}

pub fn band_summary_csv(data: &BandData) -> String {
    let mut out = String::from("band,mean_energy,Pi\n");
    for (b, (mean, pi)) in data
        .band_mean_energy
        .iter()
        .zip(&data.band_momentum_sum)
        .enumerate()
    {
        let _ = writeln!(out, "{b},{},{}", fmt_f64(*mean), fmt_f64(*pi));
    }
    out
}

fn sweep_file_name(fermi: f64) -> String {
    format!("sweep_{fermi}.csv")
}

fn write_sweep(outputs: &mut OutputSet, result: &mut SweepResult) -> Result<()> {
    let estimate = match estimate_sigma0(&result.curves) {
        Ok(est) => {
            est.annotate(&mut result.curves);
            Some(est)
        }
        Err(e) => {
            log::warn!("no conductivity quantum: {e}");
            None
        }
    };
    for curve in &result.curves {
        let mut out = String::from("efield,sigma_over_alpha,n_bands_included\n");
        for ((e, s), n) in curve
            .efield_values
            .iter()
            .zip(&curve.sigma_over_alpha)
            .zip(&curve.bands_included)
        {
            let _ = writeln!(out, "{},{},{n}", fmt_f64(*e), fmt_f64(*s));
        }
        outputs.write(&sweep_file_name(curve.fermi_level), out.as_bytes())?;
    }

    let mut summary = String::from("fermi_level,sigma0_over_alpha,residual,jump_locations\n");
    for curve in &result.curves {
        let jumps: Vec<String> = curve.jump_locations.iter().map(|&e| fmt_f64(e)).collect();
        let (unit, residual) = match &estimate {
            Some(est) => (fmt_f64(est.unit), fmt_f64(est.residual)),
            None => ("NA".to_string(), "NA".to_string()),
        };
        let _ = writeln!(
            summary,
            "{},{unit},{residual},{}",
            fmt_f64(curve.fermi_level),
            jumps.join(";")
        );
    }
    outputs.write("sigma0_summary.csv", summary.as_bytes())?;

    let mut means = String::from("efield,band,mean_energy,Pi\n");
    for (i, e) in result.efields.iter().enumerate() {
        for (b, (m, p)) in result.band_means[i]
            .iter()
            .zip(&result.band_momentum_sums[i])
            .enumerate()
        {
            let _ = writeln!(means, "{},{b},{},{}", fmt_f64(*e), fmt_f64(*m), fmt_f64(*p));
        }
    }
    outputs.write("sweep_band_means.csv", means.as_bytes())?;
    Ok(())
}

fn manifest(config: &RunConfig, threads: usize, seconds: Option<f64>) -> String {
    let p = &config.params;
    let mut out = String::new();
    let _ = writeln!(out, "mode = {}", config.mode);
    if config.mode != Mode::Scatter {
        let g = p.geometry();
        let _ = writeln!(out, "m = {}", fmt_f64(p.mass));
        let _ = writeln!(out, "e = {}", fmt_f64(p.charge));
        let _ = writeln!(out, "lambda = {}", fmt_f64(p.lambda));
        let _ = writeln!(out, "Ux = {}", fmt_f64(p.ux));
        let _ = writeln!(out, "Uy = {}", fmt_f64(p.uy));
        let _ = writeln!(out, "Efield = {}", fmt_f64(p.efield));
        let _ = writeln!(out, "N = {}", p.n_cells);
        let _ = writeln!(out, "Q = {}", p.q_states);
        let _ = writeln!(out, "J = {}", p.j_states);
        let _ = writeln!(out, "spin = {}", p.spin);
        let _ = writeln!(out, "M = {}", config.bands);
        let _ = writeln!(out, "solver = {:?}", config.solver);
        let _ = writeln!(out, "tol = {}", fmt_f64(config.tol));
        let _ = writeln!(out, "drop_duplicate_edge = {}", config.drop_duplicate_edge);
        let _ = writeln!(out, "# derived L = {}", fmt_f64(g.length));
        let _ = writeln!(out, "# derived a = {}", fmt_f64(g.lattice_constant));
        let _ = writeln!(out, "# derived q_max = {}", g.q_max);
        let _ = writeln!(out, "# derived n_max = {}", p.n_max());
        let _ = writeln!(out, "# derived D = {}", p.dim());
    }
    if let Some(range) = &config.efield_range {
        let _ = writeln!(out, "efield_min = {}", fmt_f64(range.min));
        let _ = writeln!(out, "efield_max = {}", fmt_f64(range.max));
        let _ = writeln!(out, "efield_count = {}", range.count);
    }
    if !config.fermi_levels.is_empty() {
        let levels: Vec<String> = config.fermi_levels.iter().map(|f| fmt_f64(*f)).collect();
        let _ = writeln!(out, "fermi_levels = {}", levels.join(", "));
    }
    if let Some(s) = &config.scatter {
        let _ = writeln!(out, "m = {}", fmt_f64(p.mass));
        let _ = writeln!(out, "U = {}", fmt_f64(s.strength));
        let _ = writeln!(out, "kwave = {}", fmt_f64(s.kwave));
        let _ = writeln!(out, "theta_count = {}", s.theta_count);
    }
    if config.mode == Mode::Verify {
        let _ = writeln!(out, "level = {:?}", config.level);
    }
    let _ = writeln!(out, "threads = {threads}");
    if let Some(s) = seconds {
        let _ = writeln!(out, "# wall time {s:.3} s");
    }
    out
}

fn execute(config: &RunConfig, outputs: &mut OutputSet) -> Result<(bool, Option<String>)> {
    let options = BandOptions {
        bands: config.bands,
        solver: config.solver,
        tol: config.tol,
        drop_duplicate_edge: config.drop_duplicate_edge,
    };
    match config.mode {
        Mode::Bands => {
            let data = compute_bands_with(&config.params, &options)?;
            outputs.write("bands.csv", bands_csv(&data).as_bytes())?;
            outputs.write("band_summary.csv", band_summary_csv(&data).as_bytes())?;
            if config.dump_matrix {
                for (&l, &k) in data.l_values.iter().zip(&data.kvalues) {
                    let h = build(&config.params, k)?;
                    let mut bytes = Vec::new();
                    write_matrix_dump(&h, &mut bytes).map_err(|e| Error::io("matrix dump", e))?;
                    outputs.write(&format!("hamiltonian_l{l}.bin"), &bytes)?;
                }
            }
            Ok((true, None))
        }
        Mode::Sweep => {
            let range = config
                .efield_range
                .ok_or_else(|| Error::invalid("efield_min", "sweep needs a field range"))?;
            let mut result = sweep(
                &config.params,
                &range.values(),
                &config.fermi_levels,
                &options,
            )?;
            write_sweep(outputs, &mut result)?;
            Ok((true, None))
        }
        Mode::Scatter => {
            let s = config
                .scatter
                .ok_or_else(|| Error::invalid("U", "scatter needs U and kwave"))?;
            let base = ScatteringInput {
                strength: s.strength,
                theta: 0.0,
                kwave: s.kwave,
                mass: config.params.mass,
            };
            let mut out = String::from("theta,re,im,abs2\n");
            for (theta, r) in theta_sweep(&base, s.theta_count)? {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_f64(theta),
                    fmt_f64(r.re),
                    fmt_f64(r.im),
                    fmt_f64(r.norm_sqr())
                );
            }
            outputs.write("scatter.csv", out.as_bytes())?;
            Ok((true, None))
        }
        Mode::Verify => {
            let report = run_verification_with(&config.params, config.level, config.bands)?;
            outputs.write("verify.csv", report.to_csv().as_bytes())?;
            Ok((report.passed(), Some(report.to_string())))
        }
    }
}

/// Runs the configured mode on a dedicated thread pool.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    let threads = pool.current_num_threads();

    let start = Instant::now();
    let mut outputs = OutputSet::new(&config.output_dir)?;
    let outcome = pool.install(|| execute(config, &mut outputs));
    let (passed, report) = match outcome {
        Ok(v) => v,
        Err(e) => {
            outputs.discard();
            return Err(e);
        }
    };
    let text = manifest(config, threads, Some(start.elapsed().as_secs_f64()));
    if let Err(e) = outputs.write("manifest.txt", text.as_bytes()) {
        outputs.discard();
        return Err(e);
    }
    Ok(RunSummary {
        files: outputs.written.clone(),
        manifest: text,
        passed,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1952.5837261, 1e-300, std::f64::consts::PI] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sweep_names() {
        assert_eq!(sweep_file_name(-1975.0), "sweep_-1975.csv");
        assert_eq!(sweep_file_name(-1952.5), "sweep_-1952.5.csv");
    }
}
