//! `maslov`: batch front end for the Maslov cocycle library.
//!
//! One job per invocation. The report is JSON with sorted keys, so the same
//! arguments give byte-identical output. Exit status: 0 when every check
//! passes, 1 when a check fails, 2 on malformed or invalid input.

mod commands;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use maslov::verify::DEFAULT_SEED;
use maslov::FieldCtx;
use serde::Serialize;
use serde_json::{json, Value};

use commands::{Job, Outcome};
use job::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    Kappa,
    Maslov,
    Kashiwara,
    Tau,
    Witt,
    Disc,
    Hilbert,
    BoundaryCheck,
    DiscDefectCheck,
    ReducedCheck,
    SteinbergCheck,
    Compare,
    Census,
    Lagrangians,
}

#[derive(Debug, Parser)]
#[command(name = "maslov", version, about = "Exact computations with the Maslov cocycle")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Field: JSON such as {"kind":"Fp","p":5,"eps":1}, or Q, Fp:5, Fp2:3, QSqrt:-1.
    #[arg(long, default_value = "Q")]
    field: String,
    /// Sign ε (1 or -1); overrides the descriptor.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<i64>,
    /// Shorthand for --field Fp:P.
    #[arg(long)]
    p: Option<u64>,
    /// Rank n of the hyperbolic module.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Inline JSON or path to a JSON file.
    #[arg(long)]
    input: Option<String>,
    /// SL_2 element for `compare`, as a JSON matrix.
    #[arg(long)]
    g1: Option<String>,
    #[arg(long)]
    g2: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    exhaustive: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Add elapsed wall time to the report (makes it nondeterministic).
    #[arg(long)]
    timing: bool,
}

fn input_value(args: &Args) -> CliResult<Value> {
    let mut input = job::load_input(args.input.as_deref())?;
    for (key, arg) in [("g1", &args.g1), ("g2", &args.g2)] {
        if let Some(text) = arg {
            let m: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("--{key}: {e}")))?;
            if input.is_null() {
                input = json!({});
            }
            input
                .as_object_mut()
                .ok_or_else(|| CliError::Parse("input must be a JSON object".into()))?
                .insert(key.into(), m);
        }
    }
    if !(input.is_null() || input.is_object()) {
        return Err(CliError::Parse("input must be a JSON object".into()));
    }
    Ok(input)
}

fn context(args: &Args) -> CliResult<FieldCtx> {
    match args.p {
        Some(p) => job::parse_field(&format!("Fp:{p}"), args.eps),
        None => job::parse_field(&args.field, args.eps),
    }
}

fn dispatch(command: Command, job: &Job) -> CliResult<Outcome> {
    use commands as c;
    match command {
        Command::Kappa => c::kappa(job),
        Command::Maslov => c::maslov(job),
        Command::Kashiwara => c::kashiwara(job),
        Command::Tau => c::tau(job),
        Command::Witt => c::witt(job),
        Command::Disc => c::disc(job),
        Command::Hilbert => c::hilbert(job),
        Command::BoundaryCheck => c::boundary_check(job),
        Command::DiscDefectCheck => c::disc_defect_check(job),
        Command::ReducedCheck => c::reduced_check(job),
        Command::SteinbergCheck => c::steinberg_check(job),
        Command::Compare => c::compare(job),
        Command::Census => c::census(job),
        Command::Lagrangians => c::lagrangians_cmd(job),
    }
}

fn run(args: &Args) -> CliResult<(Value, bool)> {
    let start = Instant::now();
    let ctx = context(args)?;
    let input = input_value(args)?;
    if args.n == 0 {
        return Err(CliError::Parse("--n must be positive".into()));
    }
    let job = Job { ctx, input: &input, n: args.n, trials: args.trials, seed: args.seed, exhaustive: args.exhaustive };
    let outcome = dispatch(args.command, &job)?;
    let ok = outcome.checks.iter().all(|c| c["passed"] == json!(true));
    let mut report = json!({
        "command": args.command,
        "field": job::field_json(&ctx),
        "input": {
            "data": input,
            "n": args.n,
            "trials": args.trials,
            "seed": args.seed,
            "exhaustive": args.exhaustive,
        },
        "result": outcome.result,
        "checks": outcome.checks,
        "ok": ok,
    });
    if args.timing {
        report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok((report, ok))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run(&args).and_then(|(report, ok)| {
        let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
        match &args.output {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(ok)
    });
    if let Err(e) = &outcome {
        eprintln!("{}", e.to_json());
    }
    ExitCode::from(status(&outcome))
}

fn status(outcome: &CliResult<bool>) -> u8 {
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(_) => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes() {
        assert_eq!(status(&Ok(true)), 0);
        assert_eq!(status(&Ok(false)), 1);
        assert_eq!(status(&Err(CliError::Parse("x".into()))), 2);
    }

    #[test]
    fn ok_requires_every_check() {
        let args = Args::parse_from(["maslov", "census", "--p", "3"]);
        let (report, ok) = run(&args).unwrap();
        assert!(ok);
        assert_eq!(report["ok"], true);
        assert_eq!(report["checks"][0]["name"], "fibers_are_orbits");
    }
}
