//! The solve / verify / run pipeline behind the command line.
//!
//! `solve` prepares the instance (optional permutation, then optional
//! presolve), runs branch-and-bound, and writes the event log. `verify`
//! reads the log back, re-derives the prepared model from the original
//! instance using the settings recorded in the log header — never the
//! command line — checks the model hash, and verifies every leaf, in
//! parallel if asked. `run` chains the two through the file on disk, so a
//! later standalone `verify` sees exactly what `run` saw.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::PathBuf;
use std::time::Instant;

use bnb_core::bnb::{solve_bnb, BnbAbort, BnbEvent, BnbEventKind, BnbLimits, BnbTolerances};
use bnb_core::model::{permute_model, presolve, MipProblem, PermutedModel};
use bnb_core::rational::{parse_rational, Rational};
use bnb_core::simplex_fp::FpTolerances;
use bnb_core::verify::{
    assemble_report, verify_leaf, LeafVerdict, Technique, VerificationReport, VerifyError,
    VerifyParams,
};
use thiserror::Error;

use crate::canonical::model_sha256;
use crate::eventlog::{
    encode_vec, read_log, write_log, LogHeader, LogOutcome, WireF64, WireStatus, LOG_VERSION,
};
use crate::mps::{parse_mps, MpsError};
use crate::report::ReportContext;

/// Rounds of bound propagation when presolve is on.
const PRESOLVE_MAX_ROUNDS: u32 = 10;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{message}")]
    Config { message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Mps {
        path: String,
        #[source]
        source: MpsError,
    },
    #[error("{path}: {source}")]
    Log {
        path: String,
        #[source]
        source: crate::eventlog::LogError,
    },
    #[error(
        "model mismatch: the event log was produced from a model hashing to \
         {logged}, but the instance prepared with the log's settings hashes to {actual}"
    )]
    HashMismatch { logged: String, actual: String },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("solver abort: {0}")]
    Abort(BnbAbort),
}

fn config_err(message: impl Into<String>) -> PipelineError {
    PipelineError::Config {
        message: message.into(),
    }
}

/// Parse a tolerance given as a decimal string: exact rational first, then
/// the nearest binary64. Rejects values that are not strictly positive,
/// including ones that only underflow to zero in the conversion.
pub fn parse_tolerance(name: &str, s: &str) -> Result<f64, PipelineError> {
    let r = parse_rational(s).map_err(|e| config_err(format!("--{name} {s}: {e}")))?;
    if !r.is_positive() {
        return Err(config_err(format!("--{name} must be strictly positive")));
    }
    let x = r.to_f64();
    if !(x > 0.0 && x.is_finite()) {
        return Err(config_err(format!(
            "--{name} {s} has no positive binary64 value"
        )));
    }
    Ok(x)
}

/// Everything a subcommand needs; the CLI layer fills it in.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub events: PathBuf,
    pub feastol: f64,
    pub inttol: f64,
    pub zerotol: f64,
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
    pub permute_seed: Option<u64>,
    pub max_denominator: u64,
    pub level_cap: Technique,
    pub presolve: bool,
    pub jobs: usize,
}

/// The model the solver actually sees, plus how it was derived.
pub struct PreparedInstance {
    pub model: MipProblem,
    /// Original index of each prepared row / variable (identity when the
    /// instance was not permuted).
    pub row_of_new: Vec<usize>,
    pub var_of_new: Vec<usize>,
    /// Infeasibility established exactly during preparation (crossed
    /// bounds, or presolve propagation); the search is skipped entirely.
    pub infeasible: bool,
    pub hash: String,
}

/// Permute first (so presolve sees the permuted instance, as the solver
/// will), then presolve. Crossed bounds are detected even with presolve
/// off — the simplex contract requires ℓ ≤ u.
pub fn prepare_instance(
    original: &MipProblem,
    permute_seed: Option<u64>,
    presolve_on: bool,
) -> PreparedInstance {
    let permuted = match permute_seed {
        Some(seed) => permute_model(original, seed),
        None => PermutedModel::identity(original.clone()),
    };
    let PermutedModel {
        model,
        row_of_new,
        var_of_new,
    } = permuted;

    let (model, infeasible) = if presolve_on {
        let outcome = presolve(&model, PRESOLVE_MAX_ROUNDS);
        (outcome.model, outcome.infeasible)
    } else {
        let crossed = (0..model.num_vars()).any(|j| model.lower[j] > model.upper[j]);
        (model, crossed)
    };
    let hash = model_sha256(&model);
    PreparedInstance {
        model,
        row_of_new,
        var_of_new,
        infeasible,
        hash,
    }
}

fn read_file(path: &PathBuf) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_instance(path: &PathBuf) -> Result<MipProblem, PipelineError> {
    parse_mps(&read_file(path)?).map_err(|source| PipelineError::Mps {
        path: path.display().to_string(),
        source,
    })
}

/// What `solve` reports on stdout. All values are in the internal
/// minimized form; `maximize` and `objective_offset` say how to read them.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveSummary {
    pub instance: String,
    pub status: &'static str,
    pub nodes_processed: u64,
    pub nodes_created: u64,
    pub leaves: u64,
    /// `+∞` when no incumbent was found.
    pub incumbent_objective: f64,
    pub maximize: bool,
    pub objective_offset: Rational,
    pub events: PathBuf,
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveSummary, PipelineError> {
    let original = load_instance(&cfg.input)?;
    let prep = prepare_instance(&original, cfg.permute_seed, cfg.presolve);

    let header = LogHeader {
        version: LOG_VERSION,
        instance: cfg.input.display().to_string(),
        model_sha256: prep.hash.clone(),
        presolve: cfg.presolve,
        permute_seed: cfg.permute_seed,
        feastol: WireF64::encode(cfg.feastol),
        inttol: WireF64::encode(cfg.inttol),
        zerotol: WireF64::encode(cfg.zerotol),
        node_limit: cfg.node_limit,
        time_limit: cfg.time_limit.map(WireF64::encode),
    };

    let (events, outcome) = if prep.infeasible {
        // Preparation proved infeasibility exactly; there is nothing to
        // search and nothing for verification to re-check.
        (
            Vec::new(),
            LogOutcome {
                status: WireStatus::Infeasible,
                incumbent: None,
                incumbent_objective: WireF64::encode(f64::INFINITY),
                stats: (&bnb_core::bnb::BnbStats::default()).into(),
            },
        )
    } else {
        let tol = BnbTolerances {
            feastol: cfg.feastol,
            inttol: cfg.inttol,
            zerotol: cfg.zerotol,
        };
        let start = Instant::now();
        let clock = move || start.elapsed().as_secs_f64();
        let limits = BnbLimits {
            node_limit: cfg.node_limit,
            time_limit: cfg.time_limit,
            clock: if cfg.time_limit.is_some() {
                Some(&clock)
            } else {
                None
            },
            ..BnbLimits::default()
        };
        let out = solve_bnb(&prep.model, &tol, &limits).map_err(PipelineError::Abort)?;
        let outcome = LogOutcome {
            status: out.status.into(),
            incumbent: out.incumbent.as_deref().map(encode_vec),
            incumbent_objective: WireF64::encode(out.incumbent_objective),
            stats: (&out.stats).into(),
        };
        (out.events, outcome)
    };

    let file = fs::File::create(&cfg.events).map_err(|source| PipelineError::Io {
        path: cfg.events.display().to_string(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_log(&mut out, &header, &events, &outcome)
        .and_then(|()| out.flush())
        .map_err(|source| PipelineError::Io {
            path: cfg.events.display().to_string(),
            source,
        })?;

    let s = &outcome.stats;
    Ok(SolveSummary {
        instance: header.instance,
        status: outcome.status.as_text(),
        nodes_processed: s.nodes_processed,
        nodes_created: s.nodes_created,
        leaves: s.leaves_feasible + s.leaves_lp_infeasible + s.leaves_pruned + s.leaves_deleted,
        incumbent_objective: outcome.incumbent_objective.decode(0).expect("just encoded"),
        maximize: prep.model.maximize,
        objective_offset: prep.model.objective_offset.clone(),
        events: cfg.events.clone(),
    })
}

/// Verify the leaf events against the prepared model, spreading leaves
/// round-robin over `jobs` workers. Verdicts come back in log order and
/// the first failure (by log order) wins, so the outcome does not depend
/// on the worker count.
pub fn verify_leaves(
    p: &MipProblem,
    events: &[BnbEvent],
    params: &VerifyParams,
    jobs: usize,
) -> Result<Vec<LeafVerdict>, VerifyError> {
    let leaves: Vec<&BnbEvent> = events
        .iter()
        .filter(|e| !matches!(e.kind, BnbEventKind::BestSolution { .. }))
        .collect();
    let jobs = jobs.clamp(1, leaves.len().max(1));
    if jobs == 1 {
        return leaves.iter().map(|e| verify_leaf(p, e, params)).collect();
    }

    let mut slots: Vec<Option<Result<LeafVerdict, VerifyError>>> = Vec::new();
    slots.resize_with(leaves.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..jobs {
            let leaves = &leaves;
            handles.push(scope.spawn(move || {
                let mut done = Vec::new();
                let mut i = w;
                while i < leaves.len() {
                    done.push((i, verify_leaf(p, leaves[i], params)));
                    i += jobs;
                }
                done
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("verifier worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every leaf index is visited"))
        .collect()
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(VerificationReport, ReportContext), PipelineError> {
    let log_path = cfg.events.display().to_string();
    let log = read_log(&read_file(&cfg.events)?).map_err(|source| PipelineError::Log {
        path: log_path.clone(),
        source,
    })?;

    // The header, not the command line, says how the solved model was
    // derived from the instance file.
    let original = load_instance(&cfg.input)?;
    let prep = prepare_instance(&original, log.header.permute_seed, log.header.presolve);
    if prep.hash != log.header.model_sha256 {
        return Err(PipelineError::HashMismatch {
            logged: log.header.model_sha256.clone(),
            actual: prep.hash,
        });
    }

    let as_log_err = |source| PipelineError::Log {
        path: log_path.clone(),
        source,
    };
    // Deleted-node replay must run the LP exactly as the driver did, so
    // the floating-point tolerances come from the header too.
    let fp_tol = FpTolerances {
        feastol: log.header.feastol.decode(0).map_err(as_log_err)?,
        zerotol: log.header.zerotol.decode(0).map_err(as_log_err)?,
        ..FpTolerances::default()
    };
    let params = VerifyParams {
        level_cap: cfg.level_cap,
        max_denominator: cfg.max_denominator,
        zerotol: cfg.zerotol,
        fp_tol,
        ..VerifyParams::default()
    };
    let zstar = log
        .outcome
        .incumbent_objective
        .decode(0)
        .map_err(as_log_err)?;

    let verdicts = verify_leaves(&prep.model, &log.events, &params, cfg.jobs)?;
    let report = assemble_report(verdicts, zstar);
    let ctx = ReportContext {
        instance: log.header.instance.clone(),
        solver_status: log.outcome.status.as_text().to_owned(),
        maximize: prep.model.maximize,
        objective_offset: prep.model.objective_offset.clone(),
    };
    Ok((report, ctx))
}

pub fn cmd_run(
    cfg: &RunConfig,
) -> Result<(SolveSummary, VerificationReport, ReportContext), PipelineError> {
    let summary = cmd_solve(cfg)?;
    let (report, ctx) = cmd_verify(cfg)?;
    Ok((summary, report, ctx))
}
