use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_lattice::criterion::{bs_gate, theorem_conditions, vandermonde_unit};
use hecke_lattice::induction::{hecke_generic, hecke_t, InducedFunction, TermText};
use hecke_lattice::run::RunConfig;
use hecke_lattice::tree::ball_to_dot_marked;
use hecke_lattice::verify::{
    counterexample_probe, separation_probe, sweep, t_injectivity_probe, theta_kernel_probe, ProbeLimits,
    ProbeReport, SeparationOptions, SweepSpec,
};
use hecke_lattice::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hecke", version, about = "Integral lattices in compactly induced representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the p-adic precision M.
    #[arg(long)]
    precision: Option<u32>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Counterexample,
    ThetaKernel,
    TInjectivity,
    Separation,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the weight criterion; exit 0 if it holds, 1 if not.
    CheckCriterion {
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification probe; exit 0 if its verdict is true, 1 if not.
    Probe {
        mode: Mode,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Largest number of unknowns to assemble.
        #[arg(long, default_value_t = ProbeLimits::default().max_columns)]
        max_columns: usize,
    },
    /// Apply T (or T − a_p) to a function given in textual form.
    HeckeApply {
        #[command(flatten)]
        common: Common,
        /// Function to transform (JSON list of terms).
        #[arg(long)]
        input: PathBuf,
        /// Subtract a_p times the input.
        #[arg(long)]
        minus_ap: bool,
        /// Also evaluate by convolution and require equality.
        #[arg(long)]
        oracle: bool,
    },
    /// Sweep a range of fields and weights; exit 0 if every row is consistent.
    Sweep {
        /// Range specification (TOML); defaults cover p ≤ 5, f ≤ 2, e ≤ 2, d ≤ 4.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the ball of radius N as a DOT graph.
    ExportTreeDot {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Highlight the support of this function.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::ParseError(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, v: &impl serde::Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    emit(out, &s)
}

fn load(common: &Common) -> Result<RunConfig> {
    let cfg = RunConfig::from_toml(&read(&common.config)?)?;
    match common.precision {
        Some(m) => cfg.with_precision(m),
        None => Ok(cfg),
    }
}

fn load_function(cfg: &RunConfig, path: &Path) -> Result<InducedFunction> {
    let t = cfg.tower();
    let terms: Vec<TermText> = serde_json::from_str(&read(path)?).map_err(|e| Error::ParseError(e.to_string()))?;
    InducedFunction::from_text(&t, &cfg.weight_profile(&t)?, &terms)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::CheckCriterion { common } => {
            let cfg = load(&common)?;
            let t = cfg.tower();
            let w = cfg.weight_profile(&t)?;
            let report = theorem_conditions(&w, t.p());
            let gate = cfg.satake_valuations().map(|(a, b)| bs_gate(a, b, &w, &cfg.field));
            emit_json(
                &common.out,
                &json!({
                    "weights": w.weights(),
                    "criterion": report,
                    "vandermonde_unit": vandermonde_unit(&t, &w)?,
                    "gate": gate,
                }),
            )?;
            Ok(report.verdict)
        }
        Command::Probe { mode, common, depth, nmax, seed, max_columns } => {
            let cfg = load(&common)?;
            let t = cfg.tower();
            let w = cfg.weight_profile(&t)?;
            let s = cfg.satake(&t)?;
            let depth = depth.unwrap_or(cfg.depth);
            let limits = ProbeLimits { max_columns, ..ProbeLimits::default() };
            let start = Instant::now();
            let mut report: ProbeReport = match mode {
                Mode::Counterexample => counterexample_probe(&t, &w, &s)?,
                Mode::ThetaKernel => theta_kernel_probe(&t, &w, &s, depth, &limits)?,
                Mode::TInjectivity => t_injectivity_probe(&t, &w, depth, &limits)?,
                Mode::Separation => {
                    let opts = SeparationOptions {
                        n_max: nmax.unwrap_or(cfg.nmax),
                        samples: cfg.samples,
                        seed: seed.unwrap_or(cfg.seed),
                    };
                    separation_probe(&t, &w, &s, depth, &opts, &limits)?
                }
            };
            report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
            emit_json(&common.out, &report)?;
            Ok(report.verdict)
        }
        Command::HeckeApply { common, input, minus_ap, oracle } => {
            let cfg = load(&common)?;
            let t = cfg.tower();
            let w = cfg.weight_profile(&t)?;
            let f = load_function(&cfg, &input)?;
            let s = if minus_ap { Some(cfg.satake(&t)?) } else { None };
            let out = hecke_t(&t, &w, &f, s.as_ref())?;
            if oracle {
                let mut other = hecke_generic(&t, &w, &f)?;
                if let Some(s) = &s {
                    other.add_assign(&t, &f.scale(&t, &t.neg(s.a_p())));
                }
                if !other.eq_at_precision(&t, &out) {
                    eprintln!("closed formulas and convolution disagree");
                    return Ok(false);
                }
            }
            emit_json(&common.out, &out.to_text(&t, &w))?;
            Ok(true)
        }
        Command::Sweep { config, precision, depth, out } => {
            let mut spec: SweepSpec = match config {
                Some(p) => toml::from_str(&read(&p)?).map_err(|e| Error::ParseError(e.to_string()))?,
                None => SweepSpec::default(),
            };
            if let Some(m) = precision {
                spec.precision = m;
            }
            if let Some(n) = depth {
                spec.depth = n;
            }
            let report = sweep(&spec)?;
            emit_json(&out, &report)?;
            let s = &report.summary;
            Ok(s.vandermonde_mismatches == 0
                && s.det_mismatches == 0
                && s.counterexamples == s.counterexamples_verified
                && s.theta_probes == s.theta_contained)
        }
        Command::ExportTreeDot { common, depth, input } => {
            let cfg = load(&common)?;
            let t = cfg.tower();
            let marked: Vec<_> = match input {
                Some(p) => load_function(&cfg, &p)?.support().cloned().collect(),
                None => Vec::new(),
            };
            emit(&common.out, &ball_to_dot_marked(&t, depth, &marked))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
