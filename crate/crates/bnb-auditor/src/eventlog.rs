//! The JSON-lines audit log.
//!
//! Line 1 is a header binding the log to an instance (canonical-model
//! SHA-256) and recording the solver configuration; then one line per
//! search event in emission order; the last line is the solver's claimed
//! outcome. Every binary64 travels as `{dec, bits}` — a shortest
//! round-trip decimal for human eyes and the exact bit pattern, which is
//! authoritative on the way back in. Rationals travel as `p/q` strings.
//!
//! Wall-clock time is deliberately absent: identical configuration and
//! input must produce a byte-identical log.

use std::io::{self, Write};

use bnb_core::bnb::{
    BnbEvent, BnbEventKind, BnbStats, BnbStatus, BranchDir, BranchStep, LpRecord,
    NodeInfeasibleReason, NodePath,
};
use bnb_core::rational::Rational;
use bnb_core::simplex_fp::{Basis, RowStatus, VarStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("event log line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("event log line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("event log is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> LogError {
    LogError::Malformed {
        line,
        message: message.into(),
    }
}

/// A binary64 on the wire. `bits` is the hex `to_bits()` image and decides
/// the value when reading; `dec` is informative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireF64 {
    pub dec: String,
    pub bits: String,
}

impl WireF64 {
    pub fn encode(x: f64) -> Self {
        WireF64 {
            dec: format!("{x}"),
            bits: format!("{:016x}", x.to_bits()),
        }
    }

    pub fn decode(&self, line: usize) -> Result<f64, LogError> {
        let bits = u64::from_str_radix(&self.bits, 16)
            .map_err(|_| malformed(line, format!("bad float bits `{}`", self.bits)))?;
        Ok(f64::from_bits(bits))
    }
}

pub fn encode_vec(xs: &[f64]) -> Vec<WireF64> {
    xs.iter().map(|&x| WireF64::encode(x)).collect()
}

fn decode_vec(xs: &[WireF64], line: usize) -> Result<Vec<f64>, LogError> {
    xs.iter().map(|x| x.decode(line)).collect()
}

fn encode_rational(r: &Rational) -> String {
    r.to_fraction_string()
}

fn decode_rational(s: &str, line: usize) -> Result<Rational, LogError> {
    s.parse()
        .map_err(|e| malformed(line, format!("bad rational `{s}`: {e}")))
}

/// First line of the log: instance binding and solver configuration. The
/// `presolve` flag and `permute_seed` let `verify` re-derive the exact
/// model the solver ran on from the original instance file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub version: u32,
    pub instance: String,
    pub model_sha256: String,
    pub presolve: bool,
    pub permute_seed: Option<u64>,
    pub feastol: WireF64,
    pub inttol: WireF64,
    pub zerotol: WireF64,
    pub node_limit: Option<u64>,
    pub time_limit: Option<WireF64>,
}

pub const LOG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    NodeLimit,
}

impl From<BnbStatus> for WireStatus {
    fn from(s: BnbStatus) -> Self {
        match s {
            BnbStatus::Optimal => WireStatus::Optimal,
            BnbStatus::Infeasible => WireStatus::Infeasible,
            BnbStatus::TimeLimit => WireStatus::TimeLimit,
            BnbStatus::NodeLimit => WireStatus::NodeLimit,
        }
    }
}

impl WireStatus {
    pub fn to_status(&self) -> BnbStatus {
        match self {
            WireStatus::Optimal => BnbStatus::Optimal,
            WireStatus::Infeasible => BnbStatus::Infeasible,
            WireStatus::TimeLimit => BnbStatus::TimeLimit,
            WireStatus::NodeLimit => BnbStatus::NodeLimit,
        }
    }

    pub fn as_text(&self) -> &'static str {
        match self {
            WireStatus::Optimal => "optimal",
            WireStatus::Infeasible => "infeasible",
            WireStatus::TimeLimit => "time limit",
            WireStatus::NodeLimit => "node limit",
        }
    }
}

/// Search statistics, minus wall time (see the module note on determinism).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireStats {
    pub nodes_processed: u64,
    pub nodes_created: u64,
    pub branched: u64,
    pub leaves_feasible: u64,
    pub leaves_lp_infeasible: u64,
    pub leaves_pruned: u64,
    pub leaves_deleted: u64,
    pub unprocessed: u64,
}

impl From<&BnbStats> for WireStats {
    fn from(s: &BnbStats) -> Self {
        WireStats {
            nodes_processed: s.nodes_processed,
            nodes_created: s.nodes_created,
            branched: s.branched,
            leaves_feasible: s.leaves_feasible,
            leaves_lp_infeasible: s.leaves_lp_infeasible,
            leaves_pruned: s.leaves_pruned,
            leaves_deleted: s.leaves_deleted,
            unprocessed: s.unprocessed,
        }
    }
}

/// Last line of the log: the solver's claim, to be audited.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogOutcome {
    pub status: WireStatus,
    pub incumbent: Option<Vec<WireF64>>,
    pub incumbent_objective: WireF64,
    pub stats: WireStats,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireVarStatus {
    Basic,
    AtLower,
    AtUpper,
    FreeNonbasic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireRowStatus {
    Basic,
    AtLower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireBasis {
    pub vars: Vec<WireVarStatus>,
    pub rows: Vec<WireRowStatus>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireLp {
    pub objective: WireF64,
    pub x: Vec<WireF64>,
    pub y: Vec<WireF64>,
    pub reduced: Vec<WireF64>,
    pub basis: WireBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireDir {
    GeCeil,
    LeFloor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireStep {
    pub var: usize,
    pub dir: WireDir,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireNode {
    pub id: u64,
    pub parent: Option<u64>,
    pub depth: u32,
    pub steps: Vec<WireStep>,
}

/// The event payload. `NodeInfeasible` is unfolded into its two reasons so
/// each wire kind is self-describing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WireEventKind {
    NodeFeasible { lp: WireLp },
    LpInfeasible { farkas_ray: Vec<WireF64> },
    PrunedAfterSolve { lp: WireLp },
    NodeDeleted,
    BestSolution { x: Vec<WireF64>, objective: WireF64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireEvent {
    pub seq: u64,
    pub node: WireNode,
    pub primal_bound: WireF64,
    pub event: WireEventKind,
}

/// One line of the log file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogLine {
    Header(LogHeader),
    Event(WireEvent),
    Outcome(LogOutcome),
}

// --- conversions to and from the core types ---------------------------------

fn encode_basis(b: &Basis) -> WireBasis {
    WireBasis {
        vars: b
            .vars
            .iter()
            .map(|v| match v {
                VarStatus::Basic => WireVarStatus::Basic,
                VarStatus::AtLower => WireVarStatus::AtLower,
                VarStatus::AtUpper => WireVarStatus::AtUpper,
                VarStatus::FreeNonbasic => WireVarStatus::FreeNonbasic,
            })
            .collect(),
        rows: b
            .rows
            .iter()
            .map(|r| match r {
                RowStatus::Basic => WireRowStatus::Basic,
                RowStatus::AtLower => WireRowStatus::AtLower,
            })
            .collect(),
    }
}

fn decode_basis(b: &WireBasis) -> Basis {
    Basis {
        vars: b
            .vars
            .iter()
            .map(|v| match v {
                WireVarStatus::Basic => VarStatus::Basic,
                WireVarStatus::AtLower => VarStatus::AtLower,
                WireVarStatus::AtUpper => VarStatus::AtUpper,
                WireVarStatus::FreeNonbasic => VarStatus::FreeNonbasic,
            })
            .collect(),
        rows: b
            .rows
            .iter()
            .map(|r| match r {
                WireRowStatus::Basic => RowStatus::Basic,
                WireRowStatus::AtLower => RowStatus::AtLower,
            })
            .collect(),
    }
}

fn encode_lp(lp: &LpRecord) -> WireLp {
    WireLp {
        objective: WireF64::encode(lp.objective),
        x: encode_vec(&lp.x),
        y: encode_vec(&lp.y),
        reduced: encode_vec(&lp.reduced),
        basis: encode_basis(&lp.basis),
    }
}

fn decode_lp(lp: &WireLp, line: usize) -> Result<LpRecord, LogError> {
    Ok(LpRecord {
        objective: lp.objective.decode(line)?,
        x: decode_vec(&lp.x, line)?,
        y: decode_vec(&lp.y, line)?,
        reduced: decode_vec(&lp.reduced, line)?,
        basis: decode_basis(&lp.basis),
    })
}

pub fn encode_event(e: &BnbEvent) -> WireEvent {
    let node = WireNode {
        id: e.path.node_id,
        parent: e.path.parent_id,
        depth: e.path.depth,
        steps: e
            .path
            .steps
            .iter()
            .map(|s| WireStep {
                var: s.var,
                dir: match s.dir {
                    BranchDir::GeCeil => WireDir::GeCeil,
                    BranchDir::LeFloor => WireDir::LeFloor,
                },
                bound: encode_rational(&s.bound),
            })
            .collect(),
    };
    let event = match &e.kind {
        BnbEventKind::NodeFeasible { lp } => WireEventKind::NodeFeasible { lp: encode_lp(lp) },
        BnbEventKind::NodeInfeasible { reason } => match reason {
            NodeInfeasibleReason::LpInfeasible { farkas_ray } => WireEventKind::LpInfeasible {
                farkas_ray: encode_vec(farkas_ray),
            },
            NodeInfeasibleReason::PrunedAfterSolve { lp } => {
                WireEventKind::PrunedAfterSolve { lp: encode_lp(lp) }
            }
        },
        BnbEventKind::NodeDeleted => WireEventKind::NodeDeleted,
        BnbEventKind::BestSolution { x, objective } => WireEventKind::BestSolution {
            x: encode_vec(x),
            objective: WireF64::encode(*objective),
        },
    };
    WireEvent {
        seq: e.seq,
        node,
        primal_bound: WireF64::encode(e.primal_bound_at_event),
        event,
    }
}

pub fn decode_event(e: &WireEvent, line: usize) -> Result<BnbEvent, LogError> {
    let mut steps = Vec::with_capacity(e.node.steps.len());
    for s in &e.node.steps {
        steps.push(BranchStep {
            var: s.var,
            dir: match s.dir {
                WireDir::GeCeil => BranchDir::GeCeil,
                WireDir::LeFloor => BranchDir::LeFloor,
            },
            bound: decode_rational(&s.bound, line)?,
        });
    }
    let kind = match &e.event {
        WireEventKind::NodeFeasible { lp } => BnbEventKind::NodeFeasible {
            lp: decode_lp(lp, line)?,
        },
        WireEventKind::LpInfeasible { farkas_ray } => BnbEventKind::NodeInfeasible {
            reason: NodeInfeasibleReason::LpInfeasible {
                farkas_ray: decode_vec(farkas_ray, line)?,
            },
        },
        WireEventKind::PrunedAfterSolve { lp } => BnbEventKind::NodeInfeasible {
            reason: NodeInfeasibleReason::PrunedAfterSolve {
                lp: decode_lp(lp, line)?,
            },
        },
        WireEventKind::NodeDeleted => BnbEventKind::NodeDeleted,
        WireEventKind::BestSolution { x, objective } => BnbEventKind::BestSolution {
            x: decode_vec(x, line)?,
            objective: objective.decode(line)?,
        },
    };
    Ok(BnbEvent {
        seq: e.seq,
        path: NodePath {
            steps,
            node_id: e.node.id,
            parent_id: e.node.parent,
            depth: e.node.depth,
        },
        primal_bound_at_event: e.primal_bound.decode(line)?,
        kind,
    })
}

/// A fully decoded log.
#[derive(Clone, Debug, PartialEq)]
pub struct EventLog {
    pub header: LogHeader,
    pub events: Vec<BnbEvent>,
    pub outcome: LogOutcome,
}

pub fn write_log(
    out: &mut dyn Write,
    header: &LogHeader,
    events: &[BnbEvent],
    outcome: &LogOutcome,
) -> io::Result<()> {
    let mut emit = |l: &LogLine| -> io::Result<()> {
        let json = serde_json::to_string(l).expect("log lines serialize infallibly");
        out.write_all(json.as_bytes())?;
        out.write_all(b"\n")
    };
    emit(&LogLine::Header(header.clone()))?;
    for e in events {
        emit(&LogLine::Event(encode_event(e)))?;
    }
    emit(&LogLine::Outcome(outcome.clone()))
}

pub fn read_log(text: &str) -> Result<EventLog, LogError> {
    let mut header: Option<LogHeader> = None;
    let mut outcome: Option<LogOutcome> = None;
    let mut events: Vec<BnbEvent> = Vec::new();
    let mut last_seq: Option<u64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if outcome.is_some() {
            return Err(malformed(line, "data after the outcome line"));
        }
        let parsed: LogLine =
            serde_json::from_str(raw).map_err(|source| LogError::Json { line, source })?;
        match parsed {
            LogLine::Header(h) => {
                if header.is_some() {
                    return Err(malformed(line, "second header line"));
                }
                if h.version != LOG_VERSION {
                    return Err(malformed(
                        line,
                        format!("unsupported log version {}", h.version),
                    ));
                }
                // Verification consumes the recorded tolerances; reject a
                // header whose bit patterns do not parse, right here.
                h.feastol.decode(line)?;
                h.inttol.decode(line)?;
                h.zerotol.decode(line)?;
                if let Some(t) = &h.time_limit {
                    t.decode(line)?;
                }
                header = Some(h);
            }
            LogLine::Event(e) => {
                if header.is_none() {
                    return Err(malformed(line, "event before the header"));
                }
                if last_seq.is_some_and(|s| e.seq <= s) {
                    return Err(malformed(line, "event sequence numbers must increase"));
                }
                last_seq = Some(e.seq);
                events.push(decode_event(&e, line)?);
            }
            LogLine::Outcome(o) => {
                if header.is_none() {
                    return Err(malformed(line, "outcome before the header"));
                }
                outcome = Some(o);
            }
        }
    }

    match (header, outcome) {
        (None, _) => Err(LogError::Empty),
        (_, None) => Err(malformed(0, "missing outcome line (truncated log?)")),
        (Some(header), Some(outcome)) => Ok(EventLog {
            header,
            events,
            outcome,
        }),
    }
}
