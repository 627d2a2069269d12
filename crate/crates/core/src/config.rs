//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys are rejected so
//! that typos never fall back silently to defaults. Geometry (`L`, `a`,
//! `q_max`, `n_max`, `D`) is always derived and cannot be set.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::bands::SolverChoice;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Spin};
use crate::verify::Level;

/// Documentation of every key, shown by `latticecond --help`.
pub const CONFIG_KEYS: &str = "\
Config keys (flat `key = value`, `#` comments):
  mode                 bands | sweep | scatter | verify (the CLI argument wins)
  m, e, lambda         mass, charge, spin-orbit strength (required except for scatter)
  Ux, Uy               lattice potential amplitudes (required except for scatter)
  N, Q, J              cells per side (even), position states (odd), momentum states (odd)
  Efield               field for bands/verify [default 0]
  spin                 1 or -1 [default 1]
  M                    number of bands [default 12]
  efield_min, efield_max, efield_count
                       sweep grid, uniform and ascending [count default 40]
  fermi_levels         comma-separated Fermi levels (required for sweep)
  drop_duplicate_edge  exclude l = -N/2 from the k-grid [default false]
  solver               auto | dense | lanczos [default auto]
  tol                  eigen residual tolerance relative to |H| [default 1e-10]
  level                verify level: quick | full [default quick]
  U, theta_count, kwave
                       scatter: obstacle strength, angles on [0, pi] [default 101], wavenumber
  dump_matrix          bands: also write one binary matrix dump per k [default false]
  threads              worker threads or auto [default auto]
  output_dir           output directory [default output]
L, a, q_max, n_max and D are derived from (Q, lambda, N) and may not be set.";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Bands,
    Sweep,
    Scatter,
    Verify,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "bands" => Ok(Mode::Bands),
            "sweep" => Ok(Mode::Sweep),
            "scatter" => Ok(Mode::Scatter),
            "verify" => Ok(Mode::Verify),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bands => "bands",
            Mode::Sweep => "sweep",
            Mode::Scatter => "scatter",
            Mode::Verify => "verify",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfieldRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl EfieldRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterConfig {
    pub strength: f64,
    pub kwave: f64,
    pub theta_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: ModelParams,
    pub efield_range: Option<EfieldRange>,
    pub fermi_levels: Vec<f64>,
    pub bands: usize,
    pub output_dir: PathBuf,
    /// `None` means one thread per core.
    pub threads: Option<usize>,
    pub drop_duplicate_edge: bool,
    pub solver: SolverChoice,
    pub tol: f64,
    pub level: Level,
    pub scatter: Option<ScatterConfig>,
    pub dump_matrix: bool,
}

const KNOWN: &[&str] = &[
    "mode",
    "m",
    "e",
    "lambda",
    "Ux",
    "Uy",
    "Efield",
    "N",
    "Q",
    "J",
    "spin",
    "M",
    "efield_min",
    "efield_max",
    "efield_count",
    "fermi_levels",
    "drop_duplicate_edge",
    "solver",
    "tol",
    "level",
    "U",
    "theta_count",
    "kwave",
    "dump_matrix",
    "threads",
    "output_dir",
];
const DERIVED: &[&str] = &["L", "a", "q_max", "n_max", "D"];

struct Document {
    values: BTreeMap<String, (usize, String)>,
}

impl Document {
    fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: "empty key or value".to_string(),
                });
            }
            if DERIVED.contains(&key) {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("`{key}` is derived from Q, lambda and N and cannot be set"),
                });
            }
            if !KNOWN.contains(&key) {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
            if values
                .insert(key.to_string(), (line_no, value.to_string()))
                .is_some()
            {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Document { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse().map(Some).map_err(|_| Error::ConfigParse {
                line: *line,
                message: format!("cannot parse `{raw}` for `{key}`"),
            }),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::ConfigField {
            field: key.to_string(),
            message: "missing required field".to_string(),
        })
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some((line, raw)) = self.values.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|v| {
                v.trim().parse::<f64>().map_err(|_| Error::ConfigParse {
                    line: *line,
                    message: format!("cannot parse `{}` in `{key}`", v.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

fn field_error(field: &str, message: impl Into<String>) -> Error {
    Error::ConfigField {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a configuration. `mode` overrides the `mode` key.
pub fn parse_config(text: &str, mode: Option<Mode>) -> Result<RunConfig> {
    let doc = Document::parse(text)?;
    let mode = match (mode, doc.get::<String>("mode")?) {
        (Some(m), _) => m,
        (None, Some(name)) => name.parse().map_err(|e: String| field_error("mode", e))?,
        (None, None) => return Err(field_error("mode", "no mode given")),
    };

    let spin = match doc.get::<i32>("spin")? {
        None => Spin::Up,
        Some(v) => Spin::from_i32(v).ok_or_else(|| field_error("spin", "must be 1 or -1"))?,
    };
    let physics = mode != Mode::Scatter;
    let pick = |key: &str, default: f64| -> Result<f64> {
        if physics {
            doc.required(key)
        } else {
            Ok(doc.get(key)?.unwrap_or(default))
        }
    };
    let defaults = ModelParams::default();
    let params = ModelParams {
        mass: pick("m", defaults.mass)?,
        charge: pick("e", defaults.charge)?,
        lambda: pick("lambda", defaults.lambda)?,
        ux: pick("Ux", defaults.ux)?,
        uy: pick("Uy", defaults.uy)?,
        efield: doc.get("Efield")?.unwrap_or(0.0),
        n_cells: if physics {
            doc.required("N")?
        } else {
            doc.get("N")?.unwrap_or(defaults.n_cells)
        },
        q_states: if physics {
            doc.required("Q")?
        } else {
            doc.get("Q")?.unwrap_or(defaults.q_states)
        },
        j_states: if physics {
            doc.required("J")?
        } else {
            doc.get("J")?.unwrap_or(defaults.j_states)
        },
        spin,
    };
    if physics {
        let report = params.validate();
        if let Some(first) = report.violations.first() {
            let field = first.split_whitespace().next().unwrap_or("params");
            return Err(field_error(field, report.violations.join("; ")));
        }
    } else if !(params.mass > 0.0) {
        return Err(field_error("m", "m must be positive"));
    }

    let bands: usize = doc.get("M")?.unwrap_or(12);
    if bands == 0 {
        return Err(field_error("M", "at least one band"));
    }
    if physics && bands > params.dim() {
        return Err(field_error(
            "M",
            format!("exceeds the matrix dimension {}", params.dim()),
        ));
    }

    let efield_range = match (doc.get::<f64>("efield_min")?, doc.get::<f64>("efield_max")?) {
        (Some(min), Some(max)) => {
            let count: usize = doc.get("efield_count")?.unwrap_or(40);
            if count == 0 {
                return Err(field_error("efield_count", "must be at least 1"));
            }
            if count > 1 && !(max > min) {
                return Err(field_error("efield_max", "must exceed efield_min"));
            }
            Some(EfieldRange { min, max, count })
        }
        (None, None) => None,
        (Some(_), None) => return Err(field_error("efield_max", "missing required field")),
        (None, Some(_)) => return Err(field_error("efield_min", "missing required field")),
    };
    let fermi_levels = doc.list("fermi_levels")?.unwrap_or_default();
    if mode == Mode::Sweep {
        if efield_range.is_none() {
            return Err(field_error("efield_min", "missing required field"));
        }
        if fermi_levels.is_empty() {
            return Err(field_error("fermi_levels", "missing required field"));
        }
    }

    let scatter = if mode == Mode::Scatter {
        let strength: f64 = doc.required("U")?;
        let kwave: f64 = doc.required("kwave")?;
        let theta_count: usize = doc.get("theta_count")?.unwrap_or(101);
        if !(kwave > 0.0) {
            return Err(field_error("kwave", "must be positive"));
        }
        if theta_count < 2 {
            return Err(field_error("theta_count", "at least two angles"));
        }
        Some(ScatterConfig {
            strength,
            kwave,
            theta_count,
        })
    } else {
        None
    };

    let threads = match doc.get::<String>("threads")?.as_deref() {
        None | Some("auto") => None,
        Some(n) => Some(
            n.parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| field_error("threads", "positive integer or auto"))?,
        ),
    };
    let solver = match doc.get::<String>("solver")?.as_deref() {
        None | Some("auto") => SolverChoice::Auto,
        Some("dense") => SolverChoice::Dense,
        Some("lanczos") => SolverChoice::Lanczos,
        Some(other) => return Err(field_error("solver", format!("unknown solver `{other}`"))),
    };
    let level = match doc.get::<String>("level")?.as_deref() {
        None | Some("quick") => Level::Quick,
        Some("full") => Level::Full,
        Some(other) => return Err(field_error("level", format!("unknown level `{other}`"))),
    };
    let tol: f64 = doc.get("tol")?.unwrap_or(crate::eigensolve::DEFAULT_TOL);
    if !(tol > 0.0) {
        return Err(field_error("tol", "must be positive"));
    }
    let dump_matrix: bool = doc.get("dump_matrix")?.unwrap_or(false);
    if dump_matrix && params.dim() > crate::bands::DENSE_LIMIT {
        return Err(field_error(
            "dump_matrix",
            "only available for dense-sized matrices",
        ));
    }

    Ok(RunConfig {
        mode,
        params,
        efield_range,
        fermi_levels,
        bands,
        output_dir: doc
            .get::<String>("output_dir")?
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("output")),
        threads,
        drop_duplicate_edge: doc.get("drop_duplicate_edge")?.unwrap_or(false),
        solver,
        tol,
        level,
        scatter,
        dump_matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const REFERENCE: &str = "\
# strong-potential parameter set
m = 1
e = 1
lambda = 1
Ux = 1000
Uy = 1000
N = 10
Q = 101
J = 201
";

    #[test]
    fn reference_parameters() {
        let cfg = parse_config(REFERENCE, Some(Mode::Bands)).unwrap();
        assert_eq!(cfg.params.dim(), 20301);
        assert_eq!(cfg.params, ModelParams::default());
        assert_eq!(cfg.bands, 12);
        assert_eq!(cfg.threads, None);
    }

    #[test]
    fn missing_lambda_is_named() {
        let text = REFERENCE.replace("lambda = 1\n", "");
        match parse_config(&text, Some(Mode::Bands)) {
            Err(Error::ConfigField { field, .. }) => assert_eq!(field, "lambda"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn length_cannot_be_set() {
        let text = format!("{REFERENCE}L = 30\n");
        match parse_config(&text, Some(Mode::Bands)) {
            Err(Error::ConfigParse { line, message }) => {
                assert_eq!(line, 10);
                assert!(message.contains("derived"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_has_line_number() {
        let text = format!("{REFERENCE}lamda = 2\n");
        assert!(matches!(
            parse_config(&text, Some(Mode::Bands)),
            Err(Error::ConfigParse { line: 10, .. })
        ));
    }

    #[test]
    fn invalid_parity_names_field() {
        let text = REFERENCE.replace("Q = 101", "Q = 100");
        match parse_config(&text, Some(Mode::Bands)) {
            Err(Error::ConfigField { field, .. }) => assert_eq!(field, "Q"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_requires_grid_and_levels() {
        assert!(parse_config(REFERENCE, Some(Mode::Sweep)).is_err());
        let text =
            format!("{REFERENCE}efield_min = 0\nefield_max = 2\nfermi_levels = -1975, -1950\n");
        let cfg = parse_config(&text, Some(Mode::Sweep)).unwrap();
        assert_eq!(cfg.fermi_levels, vec![-1975.0, -1950.0]);
        let range = cfg.efield_range.unwrap();
        assert_eq!(range.count, 40);
        let values = range.values();
        assert_eq!(values.len(), 40);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[39], 2.0);
    }

    #[test]
    fn scatter_needs_only_its_keys() {
        let cfg = parse_config("mode = scatter\nU = 10\nkwave = 1\n", None).unwrap();
        assert_eq!(cfg.mode, Mode::Scatter);
        assert_eq!(cfg.scatter.unwrap().theta_count, 101);
    }

    #[test]
    fn malformed_line() {
        assert!(matches!(
            parse_config("m 1\n", Some(Mode::Bands)),
            Err(Error::ConfigParse { line: 1, .. })
        ));
    }
}
