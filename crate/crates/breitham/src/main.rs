use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use breitham::commands::{emit, run};
use breitham::{CliError, Command, RunConfig, Settings};

#[derive(Parser)]
#[command(
    name = "breitham",
    version,
    about = "Momentum-lattice Hamiltonian diagonalization for scalar field theory"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Count (or list with --states) the Fock basis.
    #[command(allow_negative_numbers = true)]
    Basis(Opts),
    /// Levels E_n, M_n^2, M_n and parity at one parameter point.
    #[command(allow_negative_numbers = true)]
    Spectrum(Opts),
    /// Lowest levels over a kappa grid at fixed lambda.
    #[command(allow_negative_numbers = true)]
    Scan(Opts),
    /// Bisected critical kappa for one or more lambda values.
    #[command(allow_negative_numbers = true)]
    Critical(Opts),
    /// Scaling-law fit of a*M1 against the reduced temperature.
    #[command(allow_negative_numbers = true)]
    Fit(Opts),
    /// Ground-state parton distribution, optionally swept over g0.
    #[command(allow_negative_numbers = true)]
    Distribution(Opts),
}

#[derive(Args, Default)]
struct Opts {
    /// key=value file; flags given here override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<String>,
    /// Half-extent: total momentum is (N, .., N).
    #[arg(long = "N")]
    n: Option<String>,
    #[arg(long)]
    dk: Option<String>,
    /// Comma-separated list accepted by `critical`.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long = "m0-sq")]
    m0_sq: Option<String>,
    #[arg(long)]
    m0: Option<String>,
    /// One value or a comma-separated sweep.
    #[arg(long)]
    g0: Option<String>,
    #[arg(long = "mK-sq")]
    mk_sq: Option<String>,
    /// phi4 or phi3.
    #[arg(long)]
    vertex: Option<String>,
    /// Self-contraction modes: restricted or full.
    #[arg(long = "mode-set")]
    mode_set: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    kappas: Option<String>,
    #[arg(long = "kappa-min")]
    kappa_min: Option<String>,
    #[arg(long = "kappa-max")]
    kappa_max: Option<String>,
    #[arg(long = "kappa-steps")]
    kappa_steps: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long = "bracket-start")]
    bracket_start: Option<String>,
    #[arg(long = "bracket-factor")]
    bracket_factor: Option<String>,
    #[arg(long = "bracket-steps")]
    bracket_steps: Option<String>,
    #[arg(long = "window-lo")]
    window_lo: Option<String>,
    #[arg(long = "window-hi")]
    window_hi: Option<String>,
    #[arg(long = "kappa-crit")]
    kappa_crit: Option<String>,
    /// Scan CSV or `kappa,aM1` points for `fit`.
    #[arg(long)]
    input: Option<String>,
    #[arg(long = "g0-min")]
    g0_min: Option<String>,
    #[arg(long = "g0-max")]
    g0_max: Option<String>,
    #[arg(long = "g0-steps")]
    g0_steps: Option<String>,
    /// List every basis state.
    #[arg(long)]
    states: bool,
    /// Emit the assembled operator instead of its levels.
    #[arg(long)]
    operator: bool,
    #[arg(long, short)]
    output: Option<String>,
    #[arg(long, env = "BREITHAM_WORKERS")]
    workers: Option<String>,
    /// Significant digits of floating output, 1..=17.
    #[arg(long)]
    precision: Option<String>,
}

impl Opts {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::new(),
        };
        let mut cli = Settings::new();
        let pairs = [
            ("dim", &self.dim),
            ("N", &self.n),
            ("dk", &self.dk),
            ("lambda", &self.lambda),
            ("kappa", &self.kappa),
            ("m0_sq", &self.m0_sq),
            ("m0", &self.m0),
            ("g0", &self.g0),
            ("mK_sq", &self.mk_sq),
            ("vertex", &self.vertex),
            ("mode_set", &self.mode_set),
            ("levels", &self.levels),
            ("kappas", &self.kappas),
            ("kappa_min", &self.kappa_min),
            ("kappa_max", &self.kappa_max),
            ("kappa_steps", &self.kappa_steps),
            ("tol", &self.tol),
            ("bracket_start", &self.bracket_start),
            ("bracket_factor", &self.bracket_factor),
            ("bracket_steps", &self.bracket_steps),
            ("window_lo", &self.window_lo),
            ("window_hi", &self.window_hi),
            ("kappa_crit", &self.kappa_crit),
            ("input", &self.input),
            ("g0_min", &self.g0_min),
            ("g0_max", &self.g0_max),
            ("g0_steps", &self.g0_steps),
            ("output", &self.output),
            ("workers", &self.workers),
            ("precision", &self.precision),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cli.set(k, v.as_str())?;
            }
        }
        if self.states {
            cli.set("states", "true")?;
        }
        if self.operator {
            cli.set("operator", "true")?;
        }
        s = s.merged(&cli);
        Ok(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, opts) = match &cli.command {
        Sub::Basis(o) => (Command::Basis, o),
        Sub::Spectrum(o) => (Command::Spectrum, o),
        Sub::Scan(o) => (Command::Scan, o),
        Sub::Critical(o) => (Command::Critical, o),
        Sub::Fit(o) => (Command::Fit, o),
        Sub::Distribution(o) => (Command::Distribution, o),
    };
    let result = opts
        .settings()
        .and_then(|s| RunConfig::from_settings(command, &s))
        .and_then(|cfg| run(&cfg).and_then(|text| emit(&cfg, &text)));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("breitham {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
