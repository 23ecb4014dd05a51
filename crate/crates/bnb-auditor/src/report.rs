//! Rendering of verification reports.
//!
//! The text form is a per-instance audit summary: a one-row leaf-count
//! table with weak/strong columns per error class, the technique
//! distribution with percentages, and the safe objective interval. The
//! JSON form is stable-keyed, round-trips losslessly (rationals as `p/q`
//! strings, binary64 with bit patterns) and carries every per-leaf verdict.

use std::fmt::Write as _;

use bnb_core::rational::{ExtendedRational, Rational};
use bnb_core::verify::{
    ClassCounts, ExactIncumbent, LeafVerdict, Technique, TechniqueCounts, VerdictClass,
    VerificationReport,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eventlog::WireF64;

/// Instance-level facts that accompany a report but live in the log, not
/// in the verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportContext {
    pub instance: String,
    /// Solver status line from the log outcome (e.g. "optimal").
    pub solver_status: String,
    pub maximize: bool,
    pub objective_offset: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("report: {message}")]
pub struct ReportError {
    pub message: String,
}

fn rerr(message: impl Into<String>) -> ReportError {
    ReportError {
        message: message.into(),
    }
}

// --- text ---------------------------------------------------------------

fn ext_str(x: &ExtendedRational) -> String {
    match x {
        ExtendedRational::NegInf => "-inf".to_owned(),
        ExtendedRational::PosInf => "+inf".to_owned(),
        ExtendedRational::Finite(v) => v.to_fraction_string(),
    }
}

fn zstar_str(z: f64) -> String {
    if z == f64::INFINITY {
        "+inf".to_owned()
    } else if z == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else {
        format!("{z}")
    }
}

fn share(count: usize, decided: usize) -> String {
    let pct = if decided == 0 {
        0.0
    } else {
        100.0 * count as f64 / decided as f64
    };
    format!("{pct:.1}%")
}

pub fn render_text(report: &VerificationReport, ctx: &ReportContext) -> String {
    let c = &report.class_counts;
    let t = &report.technique_counts;
    let total = c.total();
    let decided = t.decided();

    let mut s = String::new();
    let _ = writeln!(s, "instance          {}", ctx.instance);
    let _ = writeln!(s, "solver status     {}", ctx.solver_status);
    if ctx.maximize {
        let _ = writeln!(
            s,
            "objective sense   maximize (values below are for the negated, minimized form)"
        );
    }
    if !ctx.objective_offset.is_zero() {
        let _ = writeln!(
            s,
            "objective offset  {} (excluded from the values below)",
            ctx.objective_offset.to_fraction_string()
        );
    }
    let _ = writeln!(s, "leaves            {total}");
    s.push('\n');

    let _ = writeln!(
        s,
        "{:>6} {:>6} | {:>5} {:>5} | {:>5} {:>5} | {:>5} {:>5} | {:>4} | {:>7} {:>7}",
        "Leaves", "Ver", "SolW", "SolS", "BndW", "BndS", "GapW", "GapS", "Inf", "Inconcl",
        "IterLim"
    );
    let _ = writeln!(
        s,
        "{:>6} {:>6} | {:>5} {:>5} | {:>5} {:>5} | {:>5} {:>5} | {:>4} | {:>7} {:>7}",
        total,
        c.verified,
        c.solution_weak,
        c.solution_strong,
        c.bound_weak,
        c.bound_strong,
        c.gap_weak,
        c.gap_strong,
        c.infeasibility,
        c.inconclusive,
        c.iteration_limit
    );
    s.push('\n');

    let _ = writeln!(s, "technique         leaves   share");
    let rows: [(&str, usize); 4] = [
        ("safe bounding", t.safe_bounding),
        ("reconstruction", t.reconstruction),
        ("factorization", t.factorization),
        ("exact LP", t.exact_lp),
    ];
    for (label, count) in rows {
        let _ = writeln!(s, "{label:<16} {count:>7}  {:>6}", share(count, decided));
    }
    s.push('\n');

    let _ = writeln!(s, "claimed incumbent (z*)   {}", zstar_str(report.zstar));
    let _ = writeln!(
        s,
        "exact primal bound       {}",
        ext_str(&report.exact_primal)
    );
    let interval = if total == 0 {
        // Nothing was searched; the claim is all there is.
        if report.zstar.is_finite() {
            let z = zstar_str(report.zstar);
            format!("[{z}, {z}]")
        } else {
            "no incumbent".to_owned()
        }
    } else {
        format!("[{}, {}]", ext_str(&report.zhat), zstar_str(report.zstar))
    };
    let _ = writeln!(s, "safe interval            {interval}");

    if c.inconclusive > 0 || c.iteration_limit > 0 {
        let _ = writeln!(
            s,
            "note: {} undecided leaves — the interval is conditional on their subtrees",
            c.inconclusive + c.iteration_limit
        );
    }
    s
}

// --- json ----------------------------------------------------------------

fn class_tag(c: VerdictClass) -> &'static str {
    match c {
        VerdictClass::Verified => "verified",
        VerdictClass::WeakSolutionError => "weak_solution_error",
        VerdictClass::StrongSolutionError => "strong_solution_error",
        VerdictClass::WeakBoundError => "weak_bound_error",
        VerdictClass::StrongBoundError => "strong_bound_error",
        VerdictClass::WeakGapError => "weak_gap_error",
        VerdictClass::StrongGapError => "strong_gap_error",
        VerdictClass::InfeasibilityError => "infeasibility_error",
        VerdictClass::Inconclusive => "inconclusive",
        VerdictClass::IterationLimit => "iteration_limit",
    }
}

fn parse_class(s: &str) -> Result<VerdictClass, ReportError> {
    Ok(match s {
        "verified" => VerdictClass::Verified,
        "weak_solution_error" => VerdictClass::WeakSolutionError,
        "strong_solution_error" => VerdictClass::StrongSolutionError,
        "weak_bound_error" => VerdictClass::WeakBoundError,
        "strong_bound_error" => VerdictClass::StrongBoundError,
        "weak_gap_error" => VerdictClass::WeakGapError,
        "strong_gap_error" => VerdictClass::StrongGapError,
        "infeasibility_error" => VerdictClass::InfeasibilityError,
        "inconclusive" => VerdictClass::Inconclusive,
        "iteration_limit" => VerdictClass::IterationLimit,
        other => return Err(rerr(format!("unknown verdict class `{other}`"))),
    })
}

fn technique_tag(t: Technique) -> &'static str {
    match t {
        Technique::SafeBounding => "safe_bounding",
        Technique::Reconstruction => "reconstruction",
        Technique::Factorization => "factorization",
        Technique::ExactLp => "exact_lp",
    }
}

fn parse_technique(s: &str) -> Result<Technique, ReportError> {
    Ok(match s {
        "safe_bounding" => Technique::SafeBounding,
        "reconstruction" => Technique::Reconstruction,
        "factorization" => Technique::Factorization,
        "exact_lp" => Technique::ExactLp,
        other => return Err(rerr(format!("unknown technique `{other}`"))),
    })
}

fn ext_parse(s: &str) -> Result<ExtendedRational, ReportError> {
    s.parse()
        .map_err(|e| rerr(format!("bad extended rational `{s}`: {e}")))
}

fn rational_parse(s: &str) -> Result<Rational, ReportError> {
    s.parse()
        .map_err(|e| rerr(format!("bad rational `{s}`: {e}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonClassCounts {
    pub verified: usize,
    pub solution_weak: usize,
    pub solution_strong: usize,
    pub bound_weak: usize,
    pub bound_strong: usize,
    pub gap_weak: usize,
    pub gap_strong: usize,
    pub infeasibility: usize,
    pub inconclusive: usize,
    pub iteration_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTechniqueCounts {
    pub safe_bounding: usize,
    pub reconstruction: usize,
    pub factorization: usize,
    pub exact_lp: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonIncumbent {
    pub objective: String,
    pub x: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonVerdict {
    pub seq: u64,
    pub node_id: u64,
    pub class: String,
    pub technique: Option<String>,
    pub safe_bound: Option<String>,
    pub exact_incumbent: Option<JsonIncumbent>,
}

/// The JSON document form of a report. Field order is the key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub instance: String,
    pub solver_status: String,
    pub maximize: bool,
    pub objective_offset: String,
    pub leaves: usize,
    pub fully_verified: bool,
    pub classes: JsonClassCounts,
    pub techniques: JsonTechniqueCounts,
    pub zhat: String,
    pub zstar: WireF64,
    pub exact_primal: String,
    pub verdicts: Vec<JsonVerdict>,
}

impl JsonReport {
    pub fn from_report(report: &VerificationReport, ctx: &ReportContext) -> Self {
        let c = &report.class_counts;
        let t = &report.technique_counts;
        JsonReport {
            instance: ctx.instance.clone(),
            solver_status: ctx.solver_status.clone(),
            maximize: ctx.maximize,
            objective_offset: ctx.objective_offset.to_fraction_string(),
            leaves: c.total(),
            fully_verified: report.fully_verified(),
            classes: JsonClassCounts {
                verified: c.verified,
                solution_weak: c.solution_weak,
                solution_strong: c.solution_strong,
                bound_weak: c.bound_weak,
                bound_strong: c.bound_strong,
                gap_weak: c.gap_weak,
                gap_strong: c.gap_strong,
                infeasibility: c.infeasibility,
                inconclusive: c.inconclusive,
                iteration_limit: c.iteration_limit,
            },
            techniques: JsonTechniqueCounts {
                safe_bounding: t.safe_bounding,
                reconstruction: t.reconstruction,
                factorization: t.factorization,
                exact_lp: t.exact_lp,
            },
            zhat: ext_str(&report.zhat),
            zstar: WireF64::encode(report.zstar),
            exact_primal: ext_str(&report.exact_primal),
            verdicts: report
                .verdicts
                .iter()
                .map(|v| JsonVerdict {
                    seq: v.seq,
                    node_id: v.node_id,
                    class: class_tag(v.class).to_owned(),
                    technique: v.technique.map(|t| technique_tag(t).to_owned()),
                    safe_bound: v.safe_bound.as_ref().map(ext_str),
                    exact_incumbent: v.exact_incumbent.as_ref().map(|inc| JsonIncumbent {
                        objective: inc.objective.to_fraction_string(),
                        x: inc.x.iter().map(|r| r.to_fraction_string()).collect(),
                    }),
                })
                .collect(),
        }
    }

    /// Reconstruct the in-memory report (and context) this document came
    /// from; the serialization loses nothing.
    pub fn to_report(&self) -> Result<(VerificationReport, ReportContext), ReportError> {
        let mut verdicts = Vec::with_capacity(self.verdicts.len());
        for v in &self.verdicts {
            let exact_incumbent = match &v.exact_incumbent {
                None => None,
                Some(inc) => {
                    let mut x = Vec::with_capacity(inc.x.len());
                    for s in &inc.x {
                        x.push(rational_parse(s)?);
                    }
                    Some(ExactIncumbent {
                        x,
                        objective: rational_parse(&inc.objective)?,
                    })
                }
            };
            verdicts.push(LeafVerdict {
                seq: v.seq,
                node_id: v.node_id,
                class: parse_class(&v.class)?,
                technique: v.technique.as_deref().map(parse_technique).transpose()?,
                safe_bound: v.safe_bound.as_deref().map(ext_parse).transpose()?,
                exact_incumbent,
            });
        }
        let c = &self.classes;
        let t = &self.techniques;
        let report = VerificationReport {
            verdicts,
            class_counts: ClassCounts {
                verified: c.verified,
                solution_weak: c.solution_weak,
                solution_strong: c.solution_strong,
                bound_weak: c.bound_weak,
                bound_strong: c.bound_strong,
                gap_weak: c.gap_weak,
                gap_strong: c.gap_strong,
                infeasibility: c.infeasibility,
                inconclusive: c.inconclusive,
                iteration_limit: c.iteration_limit,
            },
            technique_counts: TechniqueCounts {
                safe_bounding: t.safe_bounding,
                reconstruction: t.reconstruction,
                factorization: t.factorization,
                exact_lp: t.exact_lp,
            },
            zhat: ext_parse(&self.zhat)?,
            zstar: self
                .zstar
                .decode(0)
                .map_err(|e| rerr(format!("bad zstar: {e}")))?,
            exact_primal: ext_parse(&self.exact_primal)?,
        };
        let ctx = ReportContext {
            instance: self.instance.clone(),
            solver_status: self.solver_status.clone(),
            maximize: self.maximize,
            objective_offset: rational_parse(&self.objective_offset)?,
        };
        Ok((report, ctx))
    }
}

pub fn render_json(report: &VerificationReport, ctx: &ReportContext) -> String {
    let doc = JsonReport::from_report(report, ctx);
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize infallibly");
    s.push('\n');
    s
}
