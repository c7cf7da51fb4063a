//! `casimirkit <command> --config <path> [--out <path>] [--seed <u64>] [--verify]`
//!
//! Exit codes: 0 success, 1 `--verify` mismatch, 2 configuration error,
//! 3 numerical failure, 4 non-identifiable fit.

mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::Deserialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use commands::{Output, Payload};
use config::parse;
use report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Force,
    FitD0,
    Sensitivity,
    Crossover,
    Shift,
    Spectral,
    Hsm,
    Torque,
    Cavity,
    Pullout,
    Synth,
}

#[derive(Debug, Parser)]
#[command(name = "casimirkit", version, about = "Casimir forces, torques, cavity energies and calibration error analysis")]
struct Args {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Payload destination; the run report goes next to it as `<out>.report.json`.
    /// Without it the payload goes to stdout and the report to stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config (synth, fit-d0 Monte Carlo).
    #[arg(long)]
    seed: Option<u64>,
    /// Recompute and compare summary statistics with the existing `--out` file.
    #[arg(long)]
    verify: bool,
}

enum Failure {
    Verify(String),
    Config(String),
    Numerical(String),
    NonIdentifiable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::NonIdentifiable(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::Config(m) | Failure::Numerical(m) | Failure::NonIdentifiable(m) => m,
        }
    }
}

impl From<casimirkit::Error> for Failure {
    fn from(e: casimirkit::Error) -> Self {
        use casimirkit::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidInput(_) | E::Domain(_) | E::NotFound(_) | E::Parse { .. } | E::Io { .. } | E::PfaGuard { .. } => {
                Failure::Config(msg)
            }
            E::NonIdentifiable(_) => Failure::NonIdentifiable(msg),
            _ => Failure::Numerical(msg),
        }
    }
}

fn load<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    parse(text).map_err(Failure::Config)
}

fn dispatch(cmd: Command, text: &str, base: &Path, seed: Option<u64>) -> Result<(Output, serde_json::Value), Failure> {
    macro_rules! run {
        ($ty:ty, |$c:ident| $body:expr) => {{
            let $c: $ty = load(text)?;
            let echo = serde_json::to_value(&$c).expect("config serialises");
            ($body.map_err(Failure::from)?, echo)
        }};
    }
    use commands as c;
    use config::*;
    Ok(match cmd {
        Command::Force => run!(ForceConfig, |cfg| c::force(&cfg, base)),
        Command::FitD0 => run!(FitConfig, |cfg| c::fit(&cfg, base, seed)),
        Command::Sensitivity => run!(SensitivityConfig, |cfg| c::sensitivity(&cfg, base)),
        Command::Crossover => run!(CrossoverConfig, |cfg| c::crossover(&cfg, base)),
        Command::Shift => run!(ShiftConfig, |cfg| c::shift(&cfg, base)),
        Command::Spectral => run!(SpectralConfig, |cfg| c::spectral(&cfg, base)),
        Command::Hsm => run!(HsmConfig, |cfg| c::hsm(&cfg, base)),
        Command::Torque => run!(TorqueConfig, |cfg| c::torque(&cfg, base)),
        Command::Cavity => run!(CavityConfig, |cfg| c::cavity(&cfg)),
        Command::Pullout => run!(PullOutConfig, |cfg| c::pullout(&cfg)),
        Command::Synth => run!(SynthConfig, |cfg| c::synth(&cfg, base, seed)),
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CASIMIRKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Config(format!("CASIMIRKIT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Config(e.to_string()))
}

fn run(args: &Args) -> Result<(), Failure> {
    let start = Instant::now();
    configure_threads()?;
    let bytes = std::fs::read(&args.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Config("config is not UTF-8".into()))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    if args.verify && args.out.is_none() {
        return Err(Failure::Config("--verify needs --out pointing at a previous result".into()));
    }

    let (output, echo) = dispatch(args.command, &text, base, args.seed)?;
    let summary = report::summary(&output.payload).map_err(Failure::Numerical)?;
    let (body, is_json) = match &output.payload {
        Payload::Csv(s) => (s.clone(), false),
        Payload::Json(v) => (serde_json::to_string_pretty(v).expect("json") + "\n", true),
    };

    if args.verify {
        let path = args.out.as_ref().expect("checked above");
        let old = std::fs::read_to_string(path)
            .map_err(|e| Failure::Verify(format!("cannot read {}: {e}", path.display())))?;
        let old_summary = report::summary_of_file(&old, is_json).map_err(Failure::Verify)?;
        if old_summary != summary {
            return Err(Failure::Verify(format!(
                "summary mismatch\n  recomputed: {summary}\n  on disk:    {old_summary}"
            )));
        }
        eprintln!("verify: {} matches", path.display());
        return Ok(());
    }

    let report = RunReport {
        command: args.command.to_possible_value().expect("named").get_name().to_string(),
        artifact_version: env!("CARGO_PKG_VERSION"),
        config_sha256: hex::encode(Sha256::digest(&bytes)),
        seed: args.seed,
        inputs: echo,
        outputs: json!({ "format": if is_json { "json" } else { "csv" }, "summary": summary }),
        results: output.results,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    let report_text = serde_json::to_string_pretty(&report).expect("json") + "\n";
    match &args.out {
        Some(path) => {
            let write = |p: &Path, s: &str| {
                std::fs::write(p, s).map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))
            };
            write(path, &body)?;
            let mut rp = path.clone().into_os_string();
            rp.push(".report.json");
            write(Path::new(&rp), &report_text)?;
        }
        None => {
            print!("{body}");
            eprint!("{report_text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
