//! Run configuration: a flat `key=value` map (file first, command-line flags
//! on top) validated into a [`RunConfig`] before any computation starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use breitham_core::{build_lattice, BracketSearch, FitWindow, LatticeSpec, ModeSet, Vertex};

use crate::error::{CliError, Result};
use crate::format::DEFAULT_PRECISION;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Basis,
    Spectrum,
    Scan,
    Critical,
    Fit,
    Distribution,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Spectrum => "spectrum",
            Command::Scan => "scan",
            Command::Critical => "critical",
            Command::Fit => "fit",
            Command::Distribution => "distribution",
        }
    }
}

/// Recognized keys. Hyphens in keys are read as underscores.
pub const KEYS: &[&str] = &[
    "dim",
    "N",
    "dk",
    "lambda",
    "kappa",
    "m0_sq",
    "m0",
    "g0",
    "mK_sq",
    "vertex",
    "mode_set",
    "levels",
    "kappas",
    "kappa_min",
    "kappa_max",
    "kappa_steps",
    "tol",
    "bracket_start",
    "bracket_factor",
    "bracket_steps",
    "window_lo",
    "window_hi",
    "kappa_crit",
    "input",
    "g0_min",
    "g0_max",
    "g0_steps",
    "states",
    "operator",
    "output",
    "workers",
    "precision",
];

/// Keys that never change the content of an output file.
const NOT_ECHOED: &[&str] = &["workers", "output"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

fn normalize_key(k: &str) -> String {
    let k = k.trim().replace('-', "_");
    KEYS.iter()
        .find(|known| known.eq_ignore_ascii_case(&k))
        .map_or(k, |known| known.to_string())
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!("unknown key {key:?}")));
        }
        self.0.insert(key, value.into());
        Ok(())
    }

    /// `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut s = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: origin.into(),
                line: i + 1,
                msg: format!("expected key=value, found {line:?}"),
            })?;
            s.set(k, v.trim()).map_err(|e| CliError::Parse {
                path: origin.into(),
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Values of `other` win.
    pub fn merged(mut self, other: &Settings) -> Self {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        self.0
            .iter()
            .filter(|(k, _)| !NOT_ECHOED.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::config(format!("{key}={v:?} is not a finite number")))
            })
            .transpose()
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| CliError::config(format!("{key}: bad value {x:?}")))
                    })
                    .collect()
            })
            .transpose()
    }

    fn int(&self, key: &str) -> Result<Option<i64>> {
        self.get(key)
            .map(|v| {
                v.parse::<i64>()
                    .map_err(|_| CliError::config(format!("{key}={v:?} is not an integer")))
            })
            .transpose()
    }

    fn count(&self, key: &str, min: i64) -> Result<Option<usize>> {
        match self.int(key)? {
            Some(n) if n < min => Err(CliError::config(format!("{key}={n} must be >= {min}"))),
            other => Ok(other.map(|n| n as usize)),
        }
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "1" | "yes" | "") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(CliError::config(format!("{key}={v:?} is not a boolean"))),
        }
    }
}

/// Inclusive evenly spaced grid.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

/// How the bare couplings are given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Couplings {
    /// Lattice `(λ, κ)`; φ⁴ only.
    Lattice { lambda: f64, kappa: f64 },
    /// `(m0², g0)` in units of `dk`.
    Direct { m0_sq: f64, g0: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub lattice: LatticeSpec,
    pub vertex: Vertex,
    pub mode_set: ModeSet,
    /// Explicit kinetic mass; the per-command default applies when absent.
    pub mk_sq: Option<f64>,
    pub couplings: Option<Couplings>,
    pub lambdas: Vec<f64>,
    pub kappa_grid: Vec<f64>,
    pub m0_sq: Option<f64>,
    pub g0_grid: Vec<f64>,
    pub levels: usize,
    pub tol: f64,
    pub bracket: BracketSearch,
    pub window: Option<FitWindow>,
    pub kappa_crit: Option<f64>,
    pub input: Option<PathBuf>,
    pub list_states: bool,
    pub dump_operator: bool,
    pub output: Option<PathBuf>,
    pub workers: usize,
    pub precision: usize,
    pub echo: Vec<(String, String)>,
}

impl RunConfig {
    pub fn from_settings(command: Command, s: &Settings) -> Result<Self> {
        let dim = s
            .count("dim", 1)?
            .ok_or_else(|| CliError::config("--dim is required"))?;
        let n = s
            .int("N")?
            .ok_or_else(|| CliError::config("--N is required"))?;
        let dk = s.f64("dk")?.unwrap_or(1.0);
        let lattice = build_lattice(dim, n, dk)?;

        let vertex = match s.get("vertex") {
            None if command == Command::Distribution => Vertex::Phi3,
            None => Vertex::Phi4,
            Some("phi4" | "4") => Vertex::Phi4,
            Some("phi3" | "3") => Vertex::Phi3,
            Some(v) => return Err(CliError::config(format!("vertex={v:?}: use phi3 or phi4"))),
        };
        let mode_set = match s.get("mode_set") {
            None | Some("restricted") => ModeSet::Restricted,
            Some("full") => ModeSet::FullLattice,
            Some(v) => {
                return Err(CliError::config(format!(
                    "mode_set={v:?}: use restricted or full"
                )))
            }
        };

        let mk_sq = s.f64("mK_sq")?;
        if mk_sq.is_some_and(|m| m < 0.0) {
            return Err(CliError::config("mK_sq must be >= 0"));
        }
        let m0_sq = match (s.f64("m0_sq")?, s.f64("m0")?) {
            (Some(_), Some(_)) => return Err(CliError::config("give only one of m0_sq and m0")),
            (Some(m), None) => Some(m),
            (None, Some(m)) => Some(m * m),
            (None, None) => None,
        };
        let lambdas = s.f64_list("lambda")?.unwrap_or_default();
        if lambdas.iter().any(|l| *l < 0.0) {
            return Err(CliError::config("lambda must be >= 0"));
        }
        let kappa = s.f64("kappa")?;
        if kappa.is_some_and(|k| k <= 0.0) {
            return Err(CliError::config("kappa must be > 0"));
        }

        let g0_list = s.f64_list("g0")?;
        let g0_range = (s.f64("g0_min")?, s.f64("g0_max")?, s.count("g0_steps", 1)?);
        let g0_grid = match (g0_list, g0_range) {
            (Some(_), (Some(_), _, _) | (_, Some(_), _) | (_, _, Some(_))) => {
                return Err(CliError::config("give either g0 or g0_min/g0_max/g0_steps"))
            }
            (Some(list), _) => list,
            (None, (lo, Some(hi), Some(steps))) => linspace(lo.unwrap_or(0.0), hi, steps),
            (None, (None, None, None)) => Vec::new(),
            (None, _) => return Err(CliError::config("g0 sweep needs g0_max and g0_steps")),
        };
        if g0_grid.iter().any(|g| *g < 0.0) {
            return Err(CliError::config("g0 must be >= 0"));
        }

        let kappa_grid = match (
            s.f64_list("kappas")?,
            s.f64("kappa_min")?,
            s.f64("kappa_max")?,
            s.count("kappa_steps", 1)?,
        ) {
            (Some(list), None, None, None) => list,
            (None, Some(lo), Some(hi), Some(steps)) => linspace(lo, hi, steps),
            (None, None, None, None) => Vec::new(),
            _ => {
                return Err(CliError::config(
                    "give either kappas or all of kappa_min, kappa_max, kappa_steps",
                ))
            }
        };
        if !kappa_grid.is_empty() {
            if kappa_grid.iter().any(|k| *k <= 0.0) {
                return Err(CliError::config("kappa grid values must be > 0"));
            }
            if kappa_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(CliError::config("kappa grid must be strictly increasing"));
            }
        }

        let lattice_pair = !lambdas.is_empty() || kappa.is_some();
        let direct_pair = m0_sq.is_some() || !g0_grid.is_empty();
        let couplings = match command {
            Command::Spectrum => {
                if lattice_pair == direct_pair {
                    return Err(CliError::config(
                        "spectrum needs exactly one of (lambda, kappa) or (m0_sq|m0, g0)",
                    ));
                }
                if lattice_pair {
                    if vertex != Vertex::Phi4 {
                        return Err(CliError::config("(lambda, kappa) applies to phi4 only"));
                    }
                    match (lambdas.as_slice(), kappa) {
                        ([lambda], Some(kappa)) => Some(Couplings::Lattice {
                            lambda: *lambda,
                            kappa,
                        }),
                        _ => {
                            return Err(CliError::config("spectrum needs one lambda and one kappa"))
                        }
                    }
                } else {
                    match (m0_sq, g0_grid.as_slice()) {
                        (Some(m0_sq), [g0]) => Some(Couplings::Direct { m0_sq, g0: *g0 }),
                        _ => {
                            return Err(CliError::config(
                                "spectrum needs one m0_sq (or m0) and one g0",
                            ))
                        }
                    }
                }
            }
            _ => None,
        };

        match command {
            Command::Scan if lambdas.len() != 1 || kappa_grid.is_empty() => {
                return Err(CliError::config("scan needs one lambda and a kappa grid"))
            }
            Command::Critical if lambdas.is_empty() => {
                return Err(CliError::config("critical needs at least one lambda"))
            }
            Command::Scan | Command::Critical if vertex != Vertex::Phi4 => {
                return Err(CliError::config(
                    "scans and critical search use the phi4 vertex",
                ))
            }
            Command::Distribution if m0_sq.is_none() || g0_grid.is_empty() => {
                return Err(CliError::config(
                    "distribution needs m0_sq (or m0) and g0 values",
                ))
            }
            _ => {}
        }

        let tol = s.f64("tol")?.unwrap_or(1e-6);
        if tol <= 0.0 {
            return Err(CliError::config("tol must be > 0"));
        }
        let d = BracketSearch::default();
        let bracket = BracketSearch {
            start: s.f64("bracket_start")?.unwrap_or(d.start),
            factor: s.f64("bracket_factor")?.unwrap_or(d.factor),
            max_steps: s.count("bracket_steps", 1)?.unwrap_or(d.max_steps),
        };
        if bracket.start <= 0.0 || bracket.factor <= 1.0 {
            return Err(CliError::config(
                "bracket_start must be > 0 and bracket_factor > 1",
            ));
        }
        let window = match (s.f64("window_lo")?, s.f64("window_hi")?) {
            (None, None) => None,
            (lo, hi) => {
                let def = FitWindow::default_for(&lattice);
                let w = FitWindow {
                    mass_lo: lo.unwrap_or(def.mass_lo),
                    mass_hi: hi.unwrap_or(def.mass_hi),
                };
                if !(w.mass_lo >= 0.0 && w.mass_hi > w.mass_lo) {
                    return Err(CliError::config(
                        "fit window needs 0 <= window_lo < window_hi",
                    ));
                }
                Some(w)
            }
        };
        let kappa_crit = s.f64("kappa_crit")?;
        if kappa_crit.is_some_and(|k| k <= 0.0) {
            return Err(CliError::config("kappa_crit must be > 0"));
        }
        let precision = s.count("precision", 1)?.unwrap_or(DEFAULT_PRECISION);
        if precision > 17 {
            return Err(CliError::config("precision must be in 1..=17"));
        }

        Ok(RunConfig {
            command,
            lattice,
            vertex,
            mode_set,
            mk_sq,
            couplings,
            lambdas,
            kappa_grid,
            m0_sq,
            g0_grid,
            levels: s.count("levels", 1)?.unwrap_or(3),
            tol,
            bracket,
            window,
            kappa_crit,
            input: s.get("input").map(PathBuf::from),
            list_states: s.flag("states")?,
            dump_operator: s.flag("operator")?,
            output: s.get("output").map(PathBuf::from),
            workers: s.count("workers", 1)?.unwrap_or(1),
            precision,
            echo: s.echo(),
        })
    }

    /// Explicit kinetic mass, else `m0²` for φ³ and 0 for φ⁴.
    pub fn kinetic_mass_sq(&self, m0_sq: f64) -> f64 {
        self.mk_sq.unwrap_or(match self.vertex {
            Vertex::Phi3 => m0_sq.max(0.0),
            Vertex::Phi4 => 0.0,
        })
    }

    pub fn fit_window(&self) -> FitWindow {
        self.window
            .unwrap_or_else(|| FitWindow::default_for(&self.lattice))
    }
}
