use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnoma_harness::config::{parse_k_a, parse_m_a};
use nnoma_harness::emit::render;
use nnoma_harness::{
    load_config, run_point, run_sweep, validate, Format, HarnessError, Modes, Result, RunConfig, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "nnoma",
    version,
    about = "Outage analysis and simulation of network NOMA in CoMP systems"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Closed-form outage probabilities and sum rates.
    Analyze(Opts),
    /// Monte-Carlo outage estimates.
    Simulate(Opts),
    /// Grid of points in both modes (or the config's `modes`).
    Sweep(Opts),
    /// Analytic vs simulated comparison at one point.
    Validate(Opts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: Option<PathBuf>,
    /// NAME=LO:HI:COUNT[:log]
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Interference window radius, m.
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Chebyshev terms.
    #[arg(long)]
    n: Option<usize>,
    /// Poisson-count truncation, or `auto`.
    #[arg(long)]
    ma: Option<String>,
    /// Gamma-series terms, or `exact`.
    #[arg(long)]
    ka: Option<String>,
}

impl Opts {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.accuracy.n_terms = n;
        }
        if let Some(ma) = &self.ma {
            cfg.accuracy.m_a = parse_m_a(ma)?;
        }
        if let Some(ka) = &self.ka {
            cfg.accuracy.k_a = parse_k_a(ka)?;
        }
        cfg.accuracy.validate()?;
        if let Some(t) = self.trials {
            cfg.mc.trials = t;
        }
        if let Some(s) = self.seed {
            cfg.mc.seed = s;
        }
        if let Some(w) = self.window {
            cfg.mc.window = w;
        }
        Ok(cfg)
    }

    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            }),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| HarnessError::Io {
                    path: "<stdout>".into(),
                    source,
                }),
        }
    }
}

fn records(opts: &Opts, modes: Option<Modes>) -> Result<()> {
    let cfg = opts.config()?;
    let modes = modes.unwrap_or(cfg.modes);
    let recs = match opts.sweep.clone().or_else(|| cfg.sweep.clone()) {
        Some(arg) => run_sweep(&SweepSpec::parse(cfg, &arg, modes)?),
        None => {
            let lambda_c = cfg.params.lambda_c();
            vec![run_point(
                0,
                "lambda_c",
                lambda_c,
                &cfg.params,
                &cfg,
                modes,
                cfg.mc.seed,
            )]
        }
    };
    if recs.len() == 1 {
        if let Some(e) = &recs[0].error {
            return Err(HarnessError::Sweep(e.clone()));
        }
    }
    opts.write(&render(&recs, opts.format)?)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.verb {
        Verb::Analyze(opts) => records(&opts, Some(Modes::ANALYTIC)).map(|_| true),
        Verb::Simulate(opts) => records(&opts, Some(Modes::MC)).map(|_| true),
        Verb::Sweep(opts) => {
            if opts.sweep.is_none() && opts.config()?.sweep.is_none() {
                return Err(HarnessError::Sweep(
                    "no grid: pass --sweep or set `sweep` in the config".into(),
                ));
            }
            records(&opts, None).map(|_| true)
        }
        Verb::Validate(opts) => {
            let report = validate(&opts.config()?)?;
            opts.write(&(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": "validation_failed", "message": "validation checks failed" })
            );
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}
