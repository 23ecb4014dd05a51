//! Command-line entry point.
//!
//! Exit status: 0 when the run fully verified (or `solve` finished), 1
//! when the audit found anything other than verified leaves, 2 for usage
//! errors, IO failures, model mismatches, corrupt logs, and solver aborts.

use std::path::PathBuf;

use bnb_auditor::pipeline::{
    cmd_run, cmd_solve, cmd_verify, parse_tolerance, PipelineError, RunConfig, SolveSummary,
};
use bnb_auditor::report::{render_json, render_text, ReportContext};
use bnb_core::verify::{Technique, VerificationReport};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bnb-auditor",
    version,
    about = "Solve MIP instances with an event-logged branch-and-bound and audit \
             every leaf decision in exact rational arithmetic",
    after_help = "Exit status: 0 when every leaf verified (or `solve` finished); 1 when \
                  any leaf did not verify, including leaves left inconclusive by the \
                  verification level or an iteration limit; 2 for usage errors, IO \
                  failures, model-hash mismatches, corrupt logs, and solver aborts."
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance and write its event log
    Solve(CommonArgs),
    /// Verify an event log against the instance it came from
    Verify(CommonArgs),
    /// Solve, then verify the log just written
    Run(CommonArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    Safe,
    Reconstruct,
    Factorize,
    Exact,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Presolve {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// MPS instance file
    input: PathBuf,

    /// Event-log path (default: the input path with extension `events.jsonl`)
    #[arg(long)]
    events: Option<PathBuf>,

    /// Primal feasibility tolerance, a decimal string parsed exactly
    #[arg(long, default_value = "1e-6")]
    feastol: String,

    /// Integrality tolerance (default: the feasibility tolerance)
    #[arg(long)]
    inttol: Option<String>,

    /// Zero tolerance for dual multipliers and residuals
    #[arg(long, default_value = "1e-9")]
    zerotol: String,

    /// Stop the search after this many seconds
    #[arg(long, value_name = "SECONDS")]
    time_limit: Option<f64>,

    /// Stop the search after processing this many nodes
    #[arg(long, value_name = "NODES")]
    node_limit: Option<u64>,

    /// Shuffle rows and columns with this seed before solving
    #[arg(long, value_name = "SEED")]
    permute: Option<u64>,

    /// Denominator cap for rational reconstruction during verification
    #[arg(long, default_value_t = 1u64 << 32)]
    max_denominator: u64,

    /// Highest technique the verification cascade may use
    #[arg(long, value_enum, default_value_t = VerifyLevel::Exact)]
    verify_level: VerifyLevel,

    /// Exact presolve (cleanup and bound propagation) before solving
    #[arg(long, value_enum, default_value_t = Presolve::On)]
    presolve: Presolve,

    /// Report format for verification results
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    report: ReportFormat,

    /// Verification worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
}

fn config_err(message: String) -> PipelineError {
    PipelineError::Config { message }
}

fn build_config(args: &CommonArgs) -> Result<RunConfig, PipelineError> {
    let feastol = parse_tolerance("feastol", &args.feastol)?;
    let inttol = match &args.inttol {
        Some(s) => parse_tolerance("inttol", s)?,
        None => feastol,
    };
    let zerotol = parse_tolerance("zerotol", &args.zerotol)?;

    let permute_seed = match std::env::var("BNB_AUDITOR_SEED") {
        Ok(s) => Some(
            s.trim()
                .parse::<u64>()
                .map_err(|e| config_err(format!("BNB_AUDITOR_SEED {s:?}: {e}")))?,
        ),
        Err(std::env::VarError::NotPresent) => args.permute,
        Err(e) => return Err(config_err(format!("BNB_AUDITOR_SEED: {e}"))),
    };

    if args.max_denominator == 0 {
        return Err(config_err(
            "--max-denominator must be at least 1".to_owned(),
        ));
    }

    let jobs = args
        .jobs
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);

    Ok(RunConfig {
        input: args.input.clone(),
        events: args
            .events
            .clone()
            .unwrap_or_else(|| args.input.with_extension("events.jsonl")),
        feastol,
        inttol,
        zerotol,
        time_limit: args.time_limit,
        node_limit: args.node_limit,
        permute_seed,
        max_denominator: args.max_denominator,
        level_cap: match args.verify_level {
            VerifyLevel::Safe => Technique::SafeBounding,
            VerifyLevel::Reconstruct => Technique::Reconstruction,
            VerifyLevel::Factorize => Technique::Factorization,
            VerifyLevel::Exact => Technique::ExactLp,
        },
        presolve: args.presolve == Presolve::On,
        jobs,
    })
}

fn print_summary(s: &SolveSummary) {
    println!("instance   {}", s.instance);
    println!("status     {}", s.status);
    println!(
        "nodes      {} processed, {} created",
        s.nodes_processed, s.nodes_created
    );
    println!("leaves     {}", s.leaves);
    if s.incumbent_objective.is_finite() {
        println!("incumbent  {}", s.incumbent_objective);
    } else {
        println!("incumbent  none");
    }
    if s.maximize {
        println!("note       objective sense is maximize; values are for the negated, minimized form");
    }
    if !s.objective_offset.is_zero() {
        println!(
            "note       objective offset {} excluded from the values above",
            s.objective_offset.to_fraction_string()
        );
    }
    println!("events     {}", s.events.display());
}

fn print_report(report: &VerificationReport, ctx: &ReportContext, format: ReportFormat) {
    match format {
        ReportFormat::Text => print!("{}", render_text(report, ctx)),
        ReportFormat::Json => print!("{}", render_json(report, ctx)),
    }
}

fn verdict_code(report: &VerificationReport) -> i32 {
    if report.fully_verified() {
        0
    } else {
        1
    }
}

fn real_main(cli: Cli) -> Result<i32, PipelineError> {
    match cli.command {
        Cmd::Solve(args) => {
            let cfg = build_config(&args)?;
            let summary = cmd_solve(&cfg)?;
            print_summary(&summary);
            Ok(0)
        }
        Cmd::Verify(args) => {
            let cfg = build_config(&args)?;
            let (report, ctx) = cmd_verify(&cfg)?;
            print_report(&report, &ctx, args.report);
            Ok(verdict_code(&report))
        }
        Cmd::Run(args) => {
            let cfg = build_config(&args)?;
            let (summary, report, ctx) = cmd_run(&cfg)?;
            // JSON output stays machine-consumable: the document alone.
            if args.report == ReportFormat::Text {
                print_summary(&summary);
                println!();
            }
            print_report(&report, &ctx, args.report);
            Ok(verdict_code(&report))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match real_main(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
