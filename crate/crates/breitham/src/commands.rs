//! One function per subcommand, each returning the complete output text.

use std::io::Write as _;

use breitham_core::reference::critical_kappa;
use breitham_core::{
    assemble, eig_sym, enumerate_basis, find_kappa_crit_with, fit_scaling, ground_mass_points,
    mass_spectrum, LatticeCouplings, ModelParams, PhiFourSetup,
};

use crate::config::{Command, Couplings, RunConfig};
use crate::error::{CliError, Result};
use crate::format::{self, fmt_float, Meta};
use crate::parallel::{scan_kappa_parallel, sweep_g0};

pub fn run(cfg: &RunConfig) -> Result<String> {
    match cfg.command {
        Command::Basis => cmd_basis(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Scan => cmd_scan(cfg),
        Command::Critical => cmd_critical(cfg),
        Command::Fit => cmd_fit(cfg),
        Command::Distribution => cmd_distribution(cfg),
    }
}

/// Writes to the configured output file, or stdout when none is set.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn meta(cfg: &RunConfig, extra: Vec<String>) -> Meta {
    Meta {
        config: cfg.echo.clone(),
        lattice: Some(cfg.lattice),
        extra,
    }
}

pub fn cmd_basis(cfg: &RunConfig) -> Result<String> {
    let basis = enumerate_basis(&cfg.lattice);
    if cfg.list_states {
        Ok(format::write_basis(&basis, &meta(cfg, Vec::new())))
    } else {
        Ok(format!("{}\n", basis.len()))
    }
}

fn spectrum_params(cfg: &RunConfig) -> Result<ModelParams> {
    let params = match cfg.couplings {
        Some(Couplings::Lattice { lambda, kappa }) => ModelParams::from_lattice_couplings(
            LatticeCouplings::new(lambda, kappa)?,
            &cfg.lattice,
            cfg.kinetic_mass_sq(0.0),
        )?,
        Some(Couplings::Direct { m0_sq, g0 }) => {
            ModelParams::new(m0_sq, g0, cfg.kinetic_mass_sq(m0_sq), cfg.vertex)?
        }
        None => return Err(CliError::config("spectrum needs couplings")),
    };
    Ok(params.with_mode_set(cfg.mode_set))
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<String> {
    let params = spectrum_params(cfg)?;
    let basis = enumerate_basis(&cfg.lattice);
    let op = assemble(&basis, &cfg.lattice, &params)?;
    let extra = vec![format!(
        "params: {}",
        format::params_echo(&params, cfg.precision)
    )];
    if cfg.dump_operator {
        return Ok(format::write_operator(
            &op,
            &meta(cfg, Vec::new()),
            cfg.precision,
        ));
    }
    let spec = eig_sym(&op, true)?;
    let levels = mass_spectrum(&spec, &cfg.lattice, &basis);
    Ok(format::write_levels(
        &levels,
        &meta(cfg, extra),
        cfg.precision,
    ))
}

fn phi4_setup<'a>(cfg: &RunConfig, basis: &'a breitham_core::Basis) -> Result<PhiFourSetup<'a>> {
    Ok(
        PhiFourSetup::new(basis, &cfg.lattice, cfg.kinetic_mass_sq(0.0), cfg.levels)?
            .with_mode_set(cfg.mode_set),
    )
}

fn mk_line(cfg: &RunConfig) -> String {
    format!(
        "mK_sq={}",
        fmt_float(cfg.kinetic_mass_sq(0.0), cfg.precision)
    )
}

pub fn cmd_scan(cfg: &RunConfig) -> Result<String> {
    let basis = enumerate_basis(&cfg.lattice);
    let setup = phi4_setup(cfg, &basis)?;
    let lambda = cfg.lambdas[0];
    let outcome = scan_kappa_parallel(&setup, lambda, &cfg.kappa_grid, cfg.workers)?;
    let failures: Vec<(f64, String)> = outcome
        .failures
        .iter()
        .map(|(k, e)| (*k, e.to_string()))
        .collect();
    let levels = cfg.levels.min(basis.len());
    Ok(format::write_scan(
        &outcome.records,
        levels,
        &failures,
        &meta(cfg, vec![mk_line(cfg)]),
        cfg.precision,
    ))
}

pub fn cmd_critical(cfg: &RunConfig) -> Result<String> {
    let basis = enumerate_basis(&cfg.lattice);
    let setup = phi4_setup(cfg, &basis)?;
    let mut estimates = Vec::with_capacity(cfg.lambdas.len());
    for &lambda in &cfg.lambdas {
        let est = find_kappa_crit_with(&setup, lambda, cfg.tol, cfg.bracket)?;
        estimates.push(match critical_kappa(lambda) {
            Some(r) => est.with_reference(r),
            None => est,
        });
    }
    Ok(format::write_critical(
        &estimates,
        &meta(cfg, vec![mk_line(cfg)]),
        cfg.precision,
    ))
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<String> {
    let basis;
    let points = match &cfg.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            if format::is_scan_file(&text) {
                let a = cfg.lattice.spacing();
                format::parse_scan(&text)?
                    .iter()
                    .filter(|r| r.mass_sq.first().is_some_and(|m| *m > 0.0))
                    .map(|r| (r.kappa, a * r.mass_sq[0].sqrt()))
                    .collect()
            } else {
                format::parse_points(&text)?
            }
        }
        None => {
            if cfg.lambdas.len() != 1 || cfg.kappa_grid.is_empty() {
                return Err(CliError::config(
                    "fit needs an input file or one lambda with a kappa grid",
                ));
            }
            basis = enumerate_basis(&cfg.lattice);
            let setup = phi4_setup(cfg, &basis)?;
            let outcome =
                scan_kappa_parallel(&setup, cfg.lambdas[0], &cfg.kappa_grid, cfg.workers)?;
            ground_mass_points(&outcome.records, &cfg.lattice)
        }
    };
    let kappa_crit = match (cfg.kappa_crit, cfg.lambdas.as_slice()) {
        (Some(k), _) => k,
        (None, [lambda]) => {
            let basis = enumerate_basis(&cfg.lattice);
            let setup = phi4_setup(cfg, &basis)?;
            find_kappa_crit_with(&setup, *lambda, cfg.tol, cfg.bracket)?.kappa_crit()
        }
        (None, _) => return Err(CliError::config("fit needs kappa_crit or one lambda")),
    };
    let window = cfg.fit_window();
    let fit = fit_scaling(&points, kappa_crit, window)?;
    let extra = vec![format!(
        "window: aM1 in [{}, {}]",
        fmt_float(window.mass_lo, cfg.precision),
        fmt_float(window.mass_hi, cfg.precision)
    )];
    Ok(format::write_fit(&fit, &meta(cfg, extra), cfg.precision))
}

pub fn cmd_distribution(cfg: &RunConfig) -> Result<String> {
    let m0_sq = cfg
        .m0_sq
        .ok_or_else(|| CliError::config("distribution needs m0_sq or m0"))?;
    let params = ModelParams::new(
        m0_sq,
        cfg.g0_grid[0],
        cfg.kinetic_mass_sq(m0_sq),
        cfg.vertex,
    )?
    .with_mode_set(cfg.mode_set);
    let basis = enumerate_basis(&cfg.lattice);
    let points = sweep_g0(&basis, &cfg.lattice, params, &cfg.g0_grid, cfg.workers)?;
    let p = cfg.precision;
    let mut extra = vec![format!("params: {}", format::params_echo(&params, p))];
    for pt in &points {
        extra.push(format!(
            "g0={} E0={} n_mean={} degenerate={}",
            fmt_float(pt.g0, p),
            fmt_float(pt.energy, p),
            fmt_float(pt.mean_particle_number, p),
            pt.table.degenerate
        ));
    }
    let meta = meta(cfg, extra);
    if let [single] = points.as_slice() {
        let rows: Vec<(f64, f64)> = single.table.bins.iter().map(|b| (b.x(), b.value)).collect();
        return Ok(format::write_distribution(&rows, &meta, p));
    }
    let mut rows = Vec::new();
    for pt in &points {
        let den = pt.table.denominator();
        for (k, v) in pt.table.dense_values().into_iter().enumerate() {
            rows.push((f64::from(k as u32 + 1) / f64::from(den), pt.g0, v));
        }
    }
    Ok(format::write_distribution_sweep(&rows, &meta, p))
}
