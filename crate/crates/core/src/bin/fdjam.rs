use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdjam::cli::{self, Header};
use fdjam::config::{Scale, SweepSpec, SweepVariable};
use fdjam::{Config, Error, Result};

#[derive(Parser)]
#[command(name = "fdjam", version, about = "Secure D2D transmission with an adaptive FD/HD jamming receiver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; omitted keys take reference defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for Monte Carlo streams (overrides [sim].seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trials (validate-sop) or slots (simulate).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the off-line optimization and emit the solution as JSON.
    Optimize,
    /// Compare exact, approximate and simulated SOP; emits CSV.
    ValidateSop {
        /// Override the list of Alice-Bob distances, meters.
        #[arg(long = "d-ab", value_delimiter = ',')]
        d_ab: Vec<f64>,
    },
    /// Optimize over a parameter sweep; emits CSV.
    Sweep {
        /// Swept quantity (a [system] field, `mu_b` or `p_b`).
        #[arg(long)]
        variable: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        min: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// linear, log or dB (default: dB for powers, rho and mu_b).
        #[arg(long)]
        scale: Option<String>,
    },
    /// Simulate the on-line policy; emits JSON.
    Simulate {
        /// Solution JSON from `optimize` (optimized afresh if omitted).
        #[arg(long)]
        solution: Option<PathBuf>,
    },
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep_spec(cfg: &Config, variable: Option<String>, min: Option<f64>, max: Option<f64>, steps: Option<usize>, scale: Option<String>) -> Result<SweepSpec> {
    let mut spec = match (&cfg.sweep, &variable) {
        (Some(s), _) => s.clone(),
        (None, Some(v)) => SweepSpec {
            variable: v.clone(),
            min: 0.0,
            max: 0.0,
            steps: 2,
            scale: SweepVariable::parse(v)?.default_scale(),
            fixed: Default::default(),
        },
        (None, None) => return Err(Error::Config("sweep needs a [sweep] section or --variable".into())),
    };
    if let Some(v) = variable {
        spec.variable = v;
    }
    if let Some(x) = min {
        spec.min = x;
    }
    if let Some(x) = max {
        spec.max = x;
    }
    if let Some(n) = steps {
        spec.steps = n;
    }
    if let Some(s) = scale {
        spec.scale = match s.as_str() {
            "linear" => Scale::Linear,
            "log" => Scale::Log,
            "dB" | "db" => Scale::Db,
            other => return Err(Error::Config(format!("unknown scale `{other}`"))),
        };
    }
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<()> {
    let c = cli.common;
    if let Some(n) = c.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut cfg = match &c.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = c.seed {
        cfg.sim.seed = s;
    }
    let out = c.out.as_deref();
    match cli.command {
        Command::Optimize => {
            let report = cli::cmd_optimize(&cfg)?;
            for w in &report.diagnostics.warnings {
                eprintln!("warning: {w}");
            }
            cli::write_json(&mut open_out(out)?, &report)
        }
        Command::ValidateSop { d_ab } => {
            if !d_ab.is_empty() {
                cfg.validate_sop.d_ab = d_ab;
            }
            if let Some(t) = c.trials {
                cfg.sim.trials = t;
            }
            let rows = cli::cmd_validate_sop(&cfg, cfg.sim.trials, cfg.sim.seed)?;
            cli::write_csv(&mut open_out(out)?, &Header::new("validate-sop", &cfg), &rows)
        }
        Command::Sweep { variable, min, max, steps, scale } => {
            let spec = sweep_spec(&cfg, variable, min, max, steps, scale)?;
            cfg.sweep = Some(spec.clone());
            let rows = cli::cmd_sweep(&cfg, &spec)?;
            for r in rows.iter().filter(|r| !r.error.is_empty()) {
                eprintln!("warning: point {} ({} = {}): {}", r.index, r.variable, r.value, r.error);
            }
            cli::write_csv(&mut open_out(out)?, &Header::new("sweep", &cfg), &rows)
        }
        Command::Simulate { solution } => {
            if let Some(t) = c.trials {
                cfg.sim.slots = t;
            }
            let sol = solution.as_deref().map(cli::load_solution).transpose()?;
            let report = cli::cmd_simulate(&cfg, sol, cfg.sim.slots, cfg.sim.seed)?;
            cli::write_json(&mut open_out(out)?, &report)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
