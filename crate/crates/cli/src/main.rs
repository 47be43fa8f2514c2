use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use divseq::adversary::Mode;
use divseq::exact::parse_rational;
use divseq::verify::Check;
use divseq::Interval;
use serde_json::{json, Value};

mod commands;
mod error;
mod input;
mod report;

use error::CliError;
use report::RunReport;

/// Exact constructions on diverging sequences, each emitted as a JSON report
/// carrying its own re-verification.
#[derive(Parser)]
#[command(name = "divseq", version)]
struct Cli {
    /// Precision for log sequences that do not set one.
    #[arg(long, global = true, env = "DIVSEQ_PRECISION_BITS", default_value_t = 64)]
    precision_bits: u32,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Io {
    /// Input JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Inline input JSON.
    #[arg(long, value_name = "TEXT")]
    json: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Recorded in the report; no construction is randomized.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Diagonal dominator of a family of functions.
    Dominate {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Running-maximum envelope of a function.
    Envelope {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 100)]
        horizon: u64,
    },
    /// Block sequence with g(m) + 1 points in each [m, m + 1).
    Theorem2 {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
    },
    /// Coverage functional values for i below the horizon.
    Coverage {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 16)]
        horizon: u64,
    },
    /// Search for a member with infinitely many terms in an open set.
    ProbeC {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 10)]
        hits: u64,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Open set avoiding every member of a family.
    Adversary {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 64)]
        horizon: u64,
        #[arg(long, value_enum, default_value = "strong-max")]
        mode: ModeArg,
    },
    /// Point whose integer multiples keep hitting a set clustered at 0.
    Theorem3 {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 25)]
        depth: usize,
        /// Starting interval as `lo,hi`.
        #[arg(long, default_value = "1/1,2/1", value_parser = parse_interval)]
        start: Interval,
        /// Add the approximate logarithmic view of the hits.
        #[arg(long)]
        log_form: bool,
    },
    /// Point whose translates by a sequence keep hitting an unbounded set.
    Remark {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "0/1,1/2", value_parser = parse_interval)]
        target: Interval,
        #[arg(long, default_value_t = 20)]
        hits: usize,
    },
    /// Search rational points for a wave sequence with many hits.
    Wave {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 16)]
        denominator: u64,
        #[arg(long, default_value_t = 10)]
        hits: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
    },
    /// Bump function that vanishes on a family but not on a diverging sequence.
    DemoBump {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 512)]
        horizon: u64,
    },
    /// Re-run the checks of a saved report and compare verdicts.
    Verify {
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    StrongMax,
    Diagonal,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo = parse_rational(lo.trim()).map_err(|e| e.to_string())?;
    let hi = parse_rational(hi.trim()).map_err(|e| e.to_string())?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

fn split(cmd: Cmd, bits: u32) -> (&'static str, Io, Value) {
    match cmd {
        Cmd::Dominate { io, horizon } => ("dominate", io, json!({ "horizon": horizon })),
        Cmd::Envelope { io, horizon } => ("envelope", io, json!({ "horizon": horizon })),
        Cmd::Theorem2 { io, horizon } => ("theorem2", io, json!({ "horizon": horizon })),
        Cmd::Coverage { io, horizon } => ("coverage", io, json!({ "horizon": horizon, "precision_bits": bits })),
        Cmd::ProbeC { io, hits, horizon } => ("probe-c", io, json!({ "hits": hits, "horizon": horizon, "precision_bits": bits })),
        Cmd::Adversary { io, horizon, mode } => {
            let mode = match mode {
                ModeArg::StrongMax => Mode::StrongMax,
                ModeArg::Diagonal => Mode::Diagonal,
            };
            ("adversary", io, json!({ "horizon": horizon, "mode": mode, "precision_bits": bits }))
        }
        Cmd::Theorem3 {
            io,
            depth,
            start,
            log_form,
        } => (
            "theorem3",
            io,
            json!({ "depth": depth, "start": start, "log_form": log_form, "precision_bits": bits }),
        ),
        Cmd::Remark { io, target, hits } => ("remark", io, json!({ "hits": hits, "target": target, "precision_bits": bits })),
        Cmd::Wave {
            io,
            denominator,
            hits,
            horizon,
        } => ("wave", io, json!({ "denominator": denominator, "hits": hits, "horizon": horizon })),
        Cmd::DemoBump { io, horizon } => ("demo-bump", io, json!({ "horizon": horizon, "precision_bits": bits })),
        Cmd::Verify { io } => ("verify", io, json!({})),
    }
}

fn verdicts(checks: &[Check]) -> Vec<(&str, bool)> {
    checks.iter().map(|c| (c.check.as_str(), c.passed)).collect()
}

fn reverify(saved: &Value) -> Result<(Value, Vec<Check>, bool), CliError> {
    let r: RunReport = input::typed("report", "report", saved)?;
    if r.command == "verify" {
        return Err(CliError::Input("report: cannot verify a verify report".into()));
    }
    let recomputed = commands::recheck(&r.command, "report.input", &r.input, &r.args, &r.outputs)?;
    let same = verdicts(&recomputed) == verdicts(&r.verification);
    let mut checks = recomputed.clone();
    checks.push(Check::new(
        "verdicts-identical",
        same,
        if same {
            "recomputed verdicts match the report"
        } else {
            "recomputed verdicts differ from the report"
        },
    ));
    let outputs = json!({
        "command": r.command,
        "recorded": r.verification,
        "recomputed": recomputed,
    });
    Ok((outputs, checks, r.approximate))
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let (name, io, mut args) = split(cli.command, cli.precision_bits);
    if let Some(seed) = io.seed {
        args["seed"] = json!(seed);
    }
    let inp = input::load(io.input.as_deref(), io.json.as_deref())?;
    let clock = Instant::now();
    let (outputs, verification, approximate) = if name == "verify" {
        reverify(&inp.value)?
    } else {
        let done = commands::run(name, &inp.source, &inp.value, &args)?;
        let checks = commands::recheck(name, &inp.source, &inp.value, &args, &done.outputs)?;
        (done.outputs, checks, done.approximate)
    };
    let passed = verification.iter().all(|c| c.passed);
    let report = RunReport {
        command: name.to_string(),
        args,
        input: inp.value,
        input_digest: inp.digest,
        outputs,
        verification,
        passed,
        approximate,
        timing_ms: clock.elapsed().as_millis() as u64,
    };
    report.write(io.out.as_deref())?;
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("divseq: verification failed; see the report's `verification` entries");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("divseq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
