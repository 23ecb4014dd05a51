//! A-posteriori verification of recorded branch-and-bound leaf decisions.
//!
//! The driver's event log claims, for every leaf, one of three things: the
//! node's LP optimum was integer feasible, the node's LP was infeasible, or
//! the node could not contain anything better than the incumbent (pruned
//! after a solve, or deleted from the queue).  Each claim is re-examined
//! here in exact rational arithmetic through an escalating cascade:
//!
//! 1. [`Technique::SafeBounding`] — repair the recorded floating-point duals
//!    into an exactly feasible dual solution by shifting the exact residual
//!    into the bound multipliers, then evaluate the dual objective exactly;
//! 2. [`Technique::Reconstruction`] — first round every dual entry to a
//!    nearby small-denominator rational by continued fractions, which often
//!    recovers the exact dual vertex, then repair and evaluate as above;
//! 3. [`Technique::Factorization`] — re-derive the recorded simplex basis by
//!    exact LU factorization;
//! 4. [`Technique::ExactLp`] — full rational simplex, which always decides.
//!
//! Unverifiable claims fall into the error taxonomy of [`VerdictClass`]:
//! solution, bound, gap, and infeasibility errors, the first three split
//! into *weak* (justified in hindsight or by exact node infeasibility) and
//! *strong* (potentially compromising the reported optimum).  The verdicts
//! fold into a safe global interval: the true optimal value provably lies
//! in `[ẑ, exact primal bound]`, where ẑ is the minimum of the error
//! leaves' exact dual bounds and the exactly completed incumbent objective.
//!
//! Two conventions hold throughout:
//! * bound checks take the perspective of the floating-point solver — a
//!   prune or deletion is judged against the primal bound registered at the
//!   moment the event was emitted, converted exactly;
//! * the completion step (fixing the rounded integers and minimizing the
//!   continuous rest exactly) and the solution-error subclassification
//!   always run regardless of [`VerifyParams::level_cap`]; the cap gates
//!   only the bound-side techniques, whose distribution it exists to probe.

use alloc::vec::Vec;
use core::fmt;

use crate::bnb::{BnbEvent, BnbEventKind, LpRecord, NodeInfeasibleReason};
use crate::model::{MipProblem, VarBounds};
use crate::rational::{reconstruct_rational, ExtendedRational, Rational};
use crate::simplex_exact::{
    complete_solution, factorize_basis_exact, solve_lp_exact, CompletionOutcome, ExactLpStatus,
    FactorizeOutcome,
};
use crate::simplex_fp::{solve_lp_fp, Basis, FpLpStatus, FpTolerances};

/// Verification technique, in escalation order. The `Ord` instance is the
/// cascade order: a [`VerifyParams::level_cap`] of `t` runs every bound-side
/// technique `≤ t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Technique {
    /// Residual repair of the recorded floating-point duals.
    SafeBounding,
    /// Continued-fraction rounding of the duals, then residual repair.
    Reconstruction,
    /// Exact LU re-derivation of the recorded basis.
    Factorization,
    /// Full rational simplex.
    ExactLp,
}

/// Outcome class of one verified leaf.
///
/// The seven error classes mirror the taxonomy of incorrect leaf decisions:
/// a *solution error* is an integer-feasible claim whose rounded solution
/// admits no exact completion; a *bound error* is a prune or deletion whose
/// node exactly admits values below the primal bound it was pruned against;
/// a *gap error* is an integer-feasible claim whose completion is exactly
/// feasible but strictly above the node's exact LP value; an *infeasibility
/// error* is an LP-infeasible claim on an exactly feasible node.  Weak
/// variants are errors justified after the fact (see [`classify_hindsight`])
/// or, for solution errors, by exact infeasibility of the node itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictClass {
    Verified,
    WeakSolutionError,
    StrongSolutionError,
    WeakBoundError,
    StrongBoundError,
    WeakGapError,
    StrongGapError,
    InfeasibilityError,
    /// The level cap was reached before any technique decided. Only
    /// possible when the cap is below [`Technique::ExactLp`].
    Inconclusive,
    /// A deleted node's fresh LP re-solve hit the iteration limit; the leaf
    /// is excluded from the taxonomy and reported separately.
    IterationLimit,
}

impl VerdictClass {
    pub fn is_error(self) -> bool {
        matches!(
            self,
            VerdictClass::WeakSolutionError
                | VerdictClass::StrongSolutionError
                | VerdictClass::WeakBoundError
                | VerdictClass::StrongBoundError
                | VerdictClass::WeakGapError
                | VerdictClass::StrongGapError
                | VerdictClass::InfeasibilityError
        )
    }

    pub fn is_strong_error(self) -> bool {
        matches!(
            self,
            VerdictClass::StrongSolutionError
                | VerdictClass::StrongBoundError
                | VerdictClass::StrongGapError
                | VerdictClass::InfeasibilityError
        )
    }
}

/// An exactly feasible solution recovered by completing a leaf's rounded
/// integer assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactIncumbent {
    pub x: Vec<Rational>,
    pub objective: Rational,
}

/// The verdict on a single leaf event.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafVerdict {
    /// Sequence number of the verified event.
    pub seq: u64,
    pub node_id: u64,
    pub class: VerdictClass,
    /// The technique whose exact evidence decided the verdict; `None` for
    /// `Inconclusive` and `IterationLimit`.
    pub technique: Option<Technique>,
    /// Exact statement about the node established by the cascade: a valid
    /// dual bound for verified prunes, the node's exact LP value for bound
    /// and gap errors, `+∞` for verified infeasibility, the exact LP value
    /// (or `−∞`) for infeasibility errors.
    pub safe_bound: Option<ExtendedRational>,
    /// Present whenever the completion succeeded, including on gap errors.
    pub exact_incumbent: Option<ExactIncumbent>,
}

/// An exactly dual-feasible triple `(y, r⁺, r⁻)` for `min cᵀx, Ax ≥ b,
/// ℓ ≤ x ≤ u`, together with its exactly evaluated dual objective
/// `bᵀy + ℓᵀr⁺ − uᵀr⁻`, a valid lower bound on the LP value.
///
/// The identity `Aᵀy + r⁺ − r⁻ = c` is asserted at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SafeDualCertificate {
    pub y: Vec<Rational>,
    pub r_pos: Vec<Rational>,
    pub r_neg: Vec<Rational>,
    /// `−∞` when a nonzero corrected multiplier meets an infinite bound.
    pub safe_bound: ExtendedRational,
}

/// Knobs of the verification cascade.
#[derive(Clone, Debug)]
pub struct VerifyParams {
    /// Highest bound-side technique the cascade may use. Anything below
    /// [`Technique::ExactLp`] can leave leaves [`VerdictClass::Inconclusive`].
    pub level_cap: Technique,
    /// Denominator limit for continued-fraction reconstruction.
    pub max_denominator: u64,
    /// Dual multipliers in `[−zerotol, 0)` are clamped to zero; anything
    /// more negative disqualifies the float-level certificate.
    pub zerotol: f64,
    /// Tolerances for the deterministic LP re-solve of deleted nodes; must
    /// match what the driver ran with, so the replay reproduces the solver's
    /// view of the node.
    pub fp_tol: FpTolerances,
    /// Iteration limit for those re-solves.
    pub lp_iteration_limit: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            level_cap: Technique::ExactLp,
            max_denominator: 1 << 32,
            zerotol: 1e-9,
            fp_tol: FpTolerances::default(),
            lp_iteration_limit: u64::MAX,
        }
    }
}

/// A structurally unusable event: wrong vector lengths, non-finite numbers
/// where finite ones are guaranteed, or a kind that is not a leaf decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyError {
    pub seq: u64,
    pub what: &'static str,
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: {}", self.seq, self.what)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for VerifyError {}

/// Leaf counts by verdict class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts {
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

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.verified
            + self.errors()
            + self.inconclusive
            + self.iteration_limit
    }

    pub fn errors(&self) -> usize {
        self.solution_weak
            + self.solution_strong
            + self.bound_weak
            + self.bound_strong
            + self.gap_weak
            + self.gap_strong
            + self.infeasibility
    }
}

/// Leaf counts by deciding technique (decided leaves only).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TechniqueCounts {
    pub safe_bounding: usize,
    pub reconstruction: usize,
    pub factorization: usize,
    pub exact_lp: usize,
}

impl TechniqueCounts {
    pub fn decided(&self) -> usize {
        self.safe_bounding + self.reconstruction + self.factorization + self.exact_lp
    }
}

/// The verified summary of one event log.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    /// One verdict per leaf event, in log order, hindsight-classified.
    pub verdicts: Vec<LeafVerdict>,
    pub class_counts: ClassCounts,
    pub technique_counts: TechniqueCounts,
    /// Safe global dual bound: minimum of the error leaves' exact bounds
    /// and the exact primal bound. When every leaf is decided, the true
    /// optimum is `≥ ẑ`; inconclusive or iteration-limit leaves (reported
    /// in [`ClassCounts`]) make the interval conditional on their subtrees.
    pub zhat: ExtendedRational,
    /// The floating-point solver's claimed incumbent objective (`+∞` when
    /// it found none). Reported as the solver's claim; the trustworthy
    /// upper side of the interval is `exact_primal`.
    pub zstar: f64,
    /// Objective of the best exactly completed incumbent, `+∞` when no
    /// claimed solution could be completed.
    pub exact_primal: ExtendedRational,
}

impl VerificationReport {
    pub fn fully_verified(&self) -> bool {
        self.class_counts.verified == self.class_counts.total()
    }

    /// Objective of the best exactly recovered solution, if any.
    pub fn exact_incumbent_objective(&self) -> Option<&Rational> {
        self.exact_primal.as_finite()
    }
}

// --- dual-side primitives ---------------------------------------------------

/// Clamp small negative noise to zero; reject anything beyond `−zerotol`
/// or non-finite.
fn clamp_nonneg(vals: &[f64], zerotol: f64) -> Option<Vec<f64>> {
    let mut out = Vec::with_capacity(vals.len());
    for &v in vals {
        if !v.is_finite() || v < -zerotol {
            return None;
        }
        out.push(if v < 0.0 { 0.0 } else { v });
    }
    Some(out)
}

fn exact_of(vals: &[f64]) -> Option<Vec<Rational>> {
    vals.iter().map(|&v| Rational::from_f64(v)).collect()
}

fn reconstructed(vals: &[f64], max_denominator: u64) -> Option<Vec<Rational>> {
    vals.iter()
        .map(|&v| reconstruct_rational(v, max_denominator))
        .collect()
}

/// Split signed reduced costs into `(r⁺, r⁻) = (max(d,0), max(−d,0))`.
fn split_signed(reduced: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let r_pos = reduced.iter().map(|&d| d.max(0.0)).collect();
    let r_neg = reduced.iter().map(|&d| (-d).max(0.0)).collect();
    (r_pos, r_neg)
}

/// Repair `(y, r⁺, r⁻)` into an exactly dual-feasible triple and evaluate
/// its dual objective exactly.
///
/// The exact residual `ε = c − Aᵀy − r⁺ + r⁻` is shifted into the bound
/// multipliers (`r⁺ += max(ε, 0)`, `r⁻ += max(−ε, 0)`), which restores
/// `Aᵀy + r⁺ − r⁻ = c` without touching `y`. Each correction costs bound
/// quality but never validity; a nonzero multiplier on an infinite bound
/// collapses the bound to `−∞`.
///
/// All inputs must already be nonnegative.
pub fn safe_dual_bound_rational(
    p: &MipProblem,
    bounds: &VarBounds,
    y: Vec<Rational>,
    mut r_pos: Vec<Rational>,
    mut r_neg: Vec<Rational>,
) -> SafeDualCertificate {
    let n = p.num_vars();
    assert_eq!(y.len(), p.num_rows());
    assert_eq!(r_pos.len(), n);
    assert_eq!(r_neg.len(), n);
    assert!(
        y.iter()
            .chain(r_pos.iter())
            .chain(r_neg.iter())
            .all(|v| !v.is_negative()),
        "safe bounding requires nonnegative multipliers"
    );

    // ε = c − Aᵀy − r⁺ + r⁻, folded into the multipliers.
    let mut aty = alloc::vec![Rational::zero(); n];
    for (row, yi) in p.rows.iter().zip(&y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in row.iter() {
            aty[j] += a * yi;
        }
    }
    for j in 0..n {
        let eps = &p.objective[j] - &aty[j] - &r_pos[j] + &r_neg[j];
        if eps.is_positive() {
            r_pos[j] += eps;
        } else if eps.is_negative() {
            r_neg[j] -= eps;
        }
    }

    // The repaired triple satisfies the dual identity exactly.
    for j in 0..n {
        assert!(
            &aty[j] + &r_pos[j] - &r_neg[j] == p.objective[j],
            "safe dual repair failed the identity A^T y + r+ - r- = c"
        );
    }

    // bᵀy + ℓᵀr⁺ − uᵀr⁻, −∞ on any multiplier against an infinite bound.
    let mut acc = Rational::zero();
    for (b, yi) in p.rhs.iter().zip(&y) {
        if !yi.is_zero() {
            acc += b * yi;
        }
    }
    let mut finite = true;
    for j in 0..n {
        if !r_pos[j].is_zero() {
            match bounds.lower[j].as_finite() {
                Some(l) => acc += l * &r_pos[j],
                None => {
                    finite = false;
                    break;
                }
            }
        }
        if !r_neg[j].is_zero() {
            match bounds.upper[j].as_finite() {
                Some(u) => acc -= u * &r_neg[j],
                None => {
                    finite = false;
                    break;
                }
            }
        }
    }
    let safe_bound = if finite {
        ExtendedRational::Finite(acc)
    } else {
        ExtendedRational::NegInf
    };
    SafeDualCertificate {
        y,
        r_pos,
        r_neg,
        safe_bound,
    }
}

/// Float-facing wrapper: clamp `[−zerotol, 0)` noise to zero, convert each
/// entry to its exact rational value, then repair. `None` when any entry is
/// more negative than `−zerotol` (or non-finite) — escalate instead.
pub fn safe_dual_bound(
    p: &MipProblem,
    bounds: &VarBounds,
    y: &[f64],
    r_pos: &[f64],
    r_neg: &[f64],
    zerotol: f64,
) -> Option<SafeDualCertificate> {
    let y = exact_of(&clamp_nonneg(y, zerotol)?)?;
    let r_pos = exact_of(&clamp_nonneg(r_pos, zerotol)?)?;
    let r_neg = exact_of(&clamp_nonneg(r_neg, zerotol)?)?;
    Some(safe_dual_bound_rational(p, bounds, y, r_pos, r_neg))
}

/// Exactly validate a Farkas ray: with `z = Aᵀy`, the ray proves `Ax ≥ b`
/// empty over the box iff `yᵀb > max_{ℓ≤x≤u} zᵀx`. Returns the positive
/// margin, or `None` when the ray does not certify (zero margin, negative
/// entries, or a nonzero `z_j` against an infinite bound).
pub fn validate_farkas_rational(
    p: &MipProblem,
    bounds: &VarBounds,
    ray: &[Rational],
) -> Option<Rational> {
    assert_eq!(ray.len(), p.num_rows());
    if ray.iter().any(|v| v.is_negative()) {
        return None;
    }
    let n = p.num_vars();
    let mut z = alloc::vec![Rational::zero(); n];
    for (row, yi) in p.rows.iter().zip(ray) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in row.iter() {
            z[j] += a * yi;
        }
    }
    let mut boxmax = Rational::zero();
    for j in 0..n {
        if z[j].is_positive() {
            boxmax += bounds.upper[j].as_finite()? * &z[j];
        } else if z[j].is_negative() {
            boxmax += bounds.lower[j].as_finite()? * &z[j];
        }
    }
    let mut ytb = Rational::zero();
    for (b, yi) in p.rhs.iter().zip(ray) {
        if !yi.is_zero() {
            ytb += b * yi;
        }
    }
    let margin = ytb - boxmax;
    margin.is_positive().then_some(margin)
}

/// Float-facing wrapper with the same clamping contract as
/// [`safe_dual_bound`].
pub fn validate_farkas(
    p: &MipProblem,
    bounds: &VarBounds,
    ray: &[f64],
    zerotol: f64,
) -> Option<Rational> {
    let ray = exact_of(&clamp_nonneg(ray, zerotol)?)?;
    validate_farkas_rational(p, bounds, &ray)
}

// --- the cascade -------------------------------------------------------------

/// What the bound-side cascade established about a pruned or deleted node.
enum BoundFinding {
    /// A valid dual bound `≥ π` exists: the decision was correct.
    Holds(Technique, ExtendedRational),
    /// The node's exact LP value is `< π`: the decision was an error.
    Fails(Technique, ExtendedRational),
    /// Level cap reached first.
    Undecided,
}

fn establish_bound(
    p: &MipProblem,
    bounds: &VarBounds,
    pi: &Rational,
    y: &[f64],
    r_pos: &[f64],
    r_neg: &[f64],
    basis: Option<&Basis>,
    params: &VerifyParams,
) -> BoundFinding {
    let target = ExtendedRational::Finite(pi.clone());

    if let Some(cert) = safe_dual_bound(p, bounds, y, r_pos, r_neg, params.zerotol) {
        if cert.safe_bound >= target {
            return BoundFinding::Holds(Technique::SafeBounding, cert.safe_bound);
        }
    }

    if params.level_cap >= Technique::Reconstruction {
        if let Some(cert) = reconstruct_certificate(p, bounds, y, r_pos, r_neg, params) {
            if cert.safe_bound >= target {
                return BoundFinding::Holds(Technique::Reconstruction, cert.safe_bound);
            }
        }
    }

    if params.level_cap >= Technique::Factorization {
        if let Some(basis) = basis {
            match factorize_basis_exact(p, bounds, basis) {
                FactorizeOutcome::Optimal(res) => {
                    // The basis is exactly optimal, so its objective IS the
                    // node's LP value: this decides either way.
                    return if res.objective >= target {
                        BoundFinding::Holds(Technique::Factorization, res.objective)
                    } else {
                        BoundFinding::Fails(Technique::Factorization, res.objective)
                    };
                }
                FactorizeOutcome::DualBound { objective, .. } => {
                    // Only a lower bound: decisive when it clears π.
                    if objective >= *pi {
                        return BoundFinding::Holds(
                            Technique::Factorization,
                            ExtendedRational::Finite(objective),
                        );
                    }
                }
                FactorizeOutcome::Undecided => {}
            }
        }
    }

    if params.level_cap >= Technique::ExactLp {
        let res = solve_lp_exact(p, bounds);
        return match res.status {
            ExactLpStatus::Optimal | ExactLpStatus::Unbounded => {
                if res.objective >= target {
                    BoundFinding::Holds(Technique::ExactLp, res.objective)
                } else {
                    BoundFinding::Fails(Technique::ExactLp, res.objective)
                }
            }
            // An exactly empty node prunes vacuously.
            ExactLpStatus::Infeasible => {
                BoundFinding::Holds(Technique::ExactLp, ExtendedRational::PosInf)
            }
        };
    }
    BoundFinding::Undecided
}

fn reconstruct_certificate(
    p: &MipProblem,
    bounds: &VarBounds,
    y: &[f64],
    r_pos: &[f64],
    r_neg: &[f64],
    params: &VerifyParams,
) -> Option<SafeDualCertificate> {
    let y = reconstructed(&clamp_nonneg(y, params.zerotol)?, params.max_denominator)?;
    let r_pos = reconstructed(&clamp_nonneg(r_pos, params.zerotol)?, params.max_denominator)?;
    let r_neg = reconstructed(&clamp_nonneg(r_neg, params.zerotol)?, params.max_denominator)?;
    Some(safe_dual_bound_rational(p, bounds, y, r_pos, r_neg))
}

/// What the value-side cascade established about an integer-feasible node,
/// relative to its exactly completed objective.
enum ValueFinding {
    /// The node's LP value exactly equals the completion objective: the
    /// completion is node-optimal and the leaf is verified.
    Equal(Technique),
    /// The node's exact LP value is strictly below the completion: the
    /// floating-point optimum overshot — a gap error.
    Below(Technique, ExtendedRational),
    Undecided,
}

fn establish_value(
    p: &MipProblem,
    bounds: &VarBounds,
    completion_obj: &Rational,
    lp: &LpRecord,
    params: &VerifyParams,
) -> ValueFinding {
    let target = ExtendedRational::Finite(completion_obj.clone());
    let (r_pos, r_neg) = split_signed(&lp.reduced);

    // Any valid dual bound is ≤ the node value ≤ the completion objective,
    // so exact equality squeezes the node value onto the completion.
    if let Some(cert) = safe_dual_bound(p, bounds, &lp.y, &r_pos, &r_neg, params.zerotol) {
        debug_assert!(cert.safe_bound <= target);
        if cert.safe_bound == target {
            return ValueFinding::Equal(Technique::SafeBounding);
        }
    }

    if params.level_cap >= Technique::Reconstruction {
        if let Some(cert) = reconstruct_certificate(p, bounds, &lp.y, &r_pos, &r_neg, params) {
            debug_assert!(cert.safe_bound <= target);
            if cert.safe_bound == target {
                return ValueFinding::Equal(Technique::Reconstruction);
            }
        }
    }

    if params.level_cap >= Technique::Factorization {
        match factorize_basis_exact(p, bounds, &lp.basis) {
            FactorizeOutcome::Optimal(res) => {
                assert!(
                    res.objective <= target,
                    "a feasible completion cannot beat the node's exact LP value"
                );
                return if res.objective == target {
                    ValueFinding::Equal(Technique::Factorization)
                } else {
                    ValueFinding::Below(Technique::Factorization, res.objective)
                };
            }
            FactorizeOutcome::DualBound { objective, .. } => {
                assert!(objective <= *completion_obj);
                if objective == *completion_obj {
                    return ValueFinding::Equal(Technique::Factorization);
                }
            }
            FactorizeOutcome::Undecided => {}
        }
    }

    if params.level_cap >= Technique::ExactLp {
        let res = solve_lp_exact(p, bounds);
        return match res.status {
            ExactLpStatus::Optimal => {
                assert!(
                    res.objective <= target,
                    "a feasible completion cannot beat the node's exact LP value"
                );
                if res.objective == target {
                    ValueFinding::Equal(Technique::ExactLp)
                } else {
                    ValueFinding::Below(Technique::ExactLp, res.objective)
                }
            }
            ExactLpStatus::Unbounded => {
                ValueFinding::Below(Technique::ExactLp, ExtendedRational::NegInf)
            }
            ExactLpStatus::Infeasible => {
                unreachable!("node with a feasible completion cannot be exactly infeasible")
            }
        };
    }
    ValueFinding::Undecided
}

/// What the cascade established about an LP-infeasible claim.
enum InfeasibilityFinding {
    /// The node is exactly empty: the claim is correct.
    Empty(Technique),
    /// The node is exactly nonempty with this LP value (`−∞` if unbounded).
    NonEmpty(Technique, ExtendedRational),
    Undecided,
}

fn establish_infeasibility(
    p: &MipProblem,
    bounds: &VarBounds,
    ray: &[f64],
    params: &VerifyParams,
) -> InfeasibilityFinding {
    if validate_farkas(p, bounds, ray, params.zerotol).is_some() {
        return InfeasibilityFinding::Empty(Technique::SafeBounding);
    }

    if params.level_cap >= Technique::Reconstruction {
        if let Some(ray) = clamp_nonneg(ray, params.zerotol)
            .and_then(|r| reconstructed(&r, params.max_denominator))
        {
            if validate_farkas_rational(p, bounds, &ray).is_some() {
                return InfeasibilityFinding::Empty(Technique::Reconstruction);
            }
        }
    }

    // No basis survives an infeasible claim, so factorization is skipped.
    if params.level_cap >= Technique::ExactLp {
        let res = solve_lp_exact(p, bounds);
        return match res.status {
            ExactLpStatus::Infeasible => InfeasibilityFinding::Empty(Technique::ExactLp),
            ExactLpStatus::Optimal | ExactLpStatus::Unbounded => {
                InfeasibilityFinding::NonEmpty(Technique::ExactLp, res.objective)
            }
        };
    }
    InfeasibilityFinding::Undecided
}

// --- per-leaf verification ----------------------------------------------------

fn malformed(seq: u64, what: &'static str) -> VerifyError {
    VerifyError { seq, what }
}

fn exact_primal_bound_at(event: &BnbEvent) -> Result<Rational, VerifyError> {
    Rational::from_f64(event.primal_bound_at_event).ok_or(malformed(
        event.seq,
        "prune or deletion recorded without a finite primal bound",
    ))
}

fn verdict(
    event: &BnbEvent,
    class: VerdictClass,
    technique: Option<Technique>,
    safe_bound: Option<ExtendedRational>,
    exact_incumbent: Option<ExactIncumbent>,
) -> LeafVerdict {
    LeafVerdict {
        seq: event.seq,
        node_id: event.path.node_id,
        class,
        technique,
        safe_bound,
        exact_incumbent,
    }
}

/// Verify one leaf event against the model. Pure in `(p, event, params)`,
/// so logs can be verified in any order or in parallel.
///
/// Bound and gap errors come back provisionally *strong*;
/// [`classify_hindsight`] finishes the weak/strong split once all leaves'
/// exact incumbents are known.
pub fn verify_leaf(
    p: &MipProblem,
    event: &BnbEvent,
    params: &VerifyParams,
) -> Result<LeafVerdict, VerifyError> {
    let bounds = event.path.local_bounds(p);
    let n = p.num_vars();
    let m = p.num_rows();

    match &event.kind {
        BnbEventKind::BestSolution { .. } => Err(malformed(
            event.seq,
            "incumbent announcements are not leaf decisions",
        )),

        BnbEventKind::NodeFeasible { lp } => {
            if lp.x.len() != n || lp.y.len() != m || lp.reduced.len() != n {
                return Err(malformed(event.seq, "LP record has mismatched dimensions"));
            }
            let mut rounded = Vec::new();
            for j in p.integer_indices() {
                let v = Rational::from_f64(lp.x[j])
                    .ok_or(malformed(event.seq, "non-finite value in recorded solution"))?;
                rounded.push(v.round_half_away());
            }
            match complete_solution(p, &bounds, &rounded) {
                CompletionOutcome::Unbounded => Err(malformed(
                    event.seq,
                    "completion of a claimed optimum is unbounded",
                )),
                CompletionOutcome::Impossible { .. } => {
                    // No exact solution matches the claim; weak when the
                    // node itself is exactly empty (nothing was lost), else
                    // strong with the node's exact value as the payload.
                    let res = solve_lp_exact(p, &bounds);
                    let (class, payload) = match res.status {
                        ExactLpStatus::Infeasible => {
                            (VerdictClass::WeakSolutionError, ExtendedRational::PosInf)
                        }
                        ExactLpStatus::Optimal | ExactLpStatus::Unbounded => {
                            (VerdictClass::StrongSolutionError, res.objective)
                        }
                    };
                    Ok(verdict(
                        event,
                        class,
                        Some(Technique::ExactLp),
                        Some(payload),
                        None,
                    ))
                }
                CompletionOutcome::Completed { x, objective } => {
                    let incumbent = ExactIncumbent { x, objective };
                    let finding =
                        establish_value(p, &bounds, &incumbent.objective, lp, params);
                    Ok(match finding {
                        ValueFinding::Equal(t) => {
                            let bound =
                                ExtendedRational::Finite(incumbent.objective.clone());
                            verdict(
                                event,
                                VerdictClass::Verified,
                                Some(t),
                                Some(bound),
                                Some(incumbent),
                            )
                        }
                        ValueFinding::Below(t, v) => verdict(
                            event,
                            VerdictClass::StrongGapError,
                            Some(t),
                            Some(v),
                            Some(incumbent),
                        ),
                        ValueFinding::Undecided => verdict(
                            event,
                            VerdictClass::Inconclusive,
                            None,
                            None,
                            Some(incumbent),
                        ),
                    })
                }
            }
        }

        BnbEventKind::NodeInfeasible { reason } => match reason {
            NodeInfeasibleReason::LpInfeasible { farkas_ray } => {
                if farkas_ray.len() != m {
                    return Err(malformed(event.seq, "Farkas ray has mismatched dimension"));
                }
                Ok(match establish_infeasibility(p, &bounds, farkas_ray, params) {
                    InfeasibilityFinding::Empty(t) => verdict(
                        event,
                        VerdictClass::Verified,
                        Some(t),
                        Some(ExtendedRational::PosInf),
                        None,
                    ),
                    InfeasibilityFinding::NonEmpty(t, v) => verdict(
                        event,
                        VerdictClass::InfeasibilityError,
                        Some(t),
                        Some(v),
                        None,
                    ),
                    InfeasibilityFinding::Undecided => {
                        verdict(event, VerdictClass::Inconclusive, None, None, None)
                    }
                })
            }
            NodeInfeasibleReason::PrunedAfterSolve { lp } => {
                if lp.x.len() != n || lp.y.len() != m || lp.reduced.len() != n {
                    return Err(malformed(event.seq, "LP record has mismatched dimensions"));
                }
                let pi = exact_primal_bound_at(event)?;
                let (r_pos, r_neg) = split_signed(&lp.reduced);
                Ok(bound_verdict(
                    event,
                    establish_bound(
                        p,
                        &bounds,
                        &pi,
                        &lp.y,
                        &r_pos,
                        &r_neg,
                        Some(&lp.basis),
                        params,
                    ),
                ))
            }
        },

        BnbEventKind::NodeDeleted => {
            let pi = exact_primal_bound_at(event)?;
            // The deletion consulted only the inherited parent bound; the
            // node's own LP was never solved. Re-solve it deterministically
            // to obtain the certificate material the log never carried.
            let res = solve_lp_fp(p, &bounds, &params.fp_tol, params.lp_iteration_limit);
            match res.status {
                FpLpStatus::IterationLimit => Ok(verdict(
                    event,
                    VerdictClass::IterationLimit,
                    None,
                    None,
                    None,
                )),
                FpLpStatus::Unbounded => Err(malformed(
                    event.seq,
                    "re-solve of a deleted node is unbounded",
                )),
                FpLpStatus::Optimal => Ok(bound_verdict(
                    event,
                    establish_bound(
                        p,
                        &bounds,
                        &pi,
                        &res.y,
                        &res.r_pos,
                        &res.r_neg,
                        res.basis.as_ref(),
                        params,
                    ),
                )),
                FpLpStatus::Infeasible => {
                    let ray = res
                        .farkas_ray
                        .as_deref()
                        .expect("infeasible fp solve carries a ray");
                    // An exactly empty node justifies any deletion; an
                    // exactly nonempty one is judged against π like a prune.
                    Ok(match establish_infeasibility(p, &bounds, ray, params) {
                        InfeasibilityFinding::Empty(t) => verdict(
                            event,
                            VerdictClass::Verified,
                            Some(t),
                            Some(ExtendedRational::PosInf),
                            None,
                        ),
                        InfeasibilityFinding::NonEmpty(t, v) => {
                            if v >= ExtendedRational::Finite(pi.clone()) {
                                verdict(event, VerdictClass::Verified, Some(t), Some(v), None)
                            } else {
                                verdict(
                                    event,
                                    VerdictClass::StrongBoundError,
                                    Some(t),
                                    Some(v),
                                    None,
                                )
                            }
                        }
                        InfeasibilityFinding::Undecided => {
                            verdict(event, VerdictClass::Inconclusive, None, None, None)
                        }
                    })
                }
            }
        }
    }
}

fn bound_verdict(event: &BnbEvent, finding: BoundFinding) -> LeafVerdict {
    match finding {
        BoundFinding::Holds(t, b) => {
            verdict(event, VerdictClass::Verified, Some(t), Some(b), None)
        }
        BoundFinding::Fails(t, v) => verdict(
            event,
            VerdictClass::StrongBoundError,
            Some(t),
            Some(v),
            None,
        ),
        BoundFinding::Undecided => verdict(event, VerdictClass::Inconclusive, None, None, None),
    }
}

// --- hindsight classification and the global interval -------------------------

/// Finish the weak/strong split using every exactly completed incumbent.
///
/// A bound error is *weak* when a later exactly completed incumbent has
/// objective `≤` the node's exact bound — the floating-point bound held
/// against the primal bound the solver eventually reached, so nothing was
/// lost. A gap error is *weak* when the final exact primal bound is `≤` the
/// node's exact LP value. Boundary cases count as justified (equality is
/// enough): pruning at exactly the eventual incumbent value loses nothing.
pub fn classify_hindsight(verdicts: &mut [LeafVerdict]) {
    let timeline: Vec<(u64, Rational)> = verdicts
        .iter()
        .filter_map(|v| {
            v.exact_incumbent
                .as_ref()
                .map(|inc| (v.seq, inc.objective.clone()))
        })
        .collect();
    let final_best: Option<&Rational> = timeline.iter().map(|(_, o)| o).min();

    for v in verdicts.iter_mut() {
        match v.class {
            VerdictClass::StrongBoundError => {
                let bound = v
                    .safe_bound
                    .as_ref()
                    .expect("bound errors carry the exact bound");
                let justified = timeline.iter().any(|(seq, obj)| {
                    *seq > v.seq && ExtendedRational::Finite(obj.clone()) <= *bound
                });
                if justified {
                    v.class = VerdictClass::WeakBoundError;
                }
            }
            VerdictClass::StrongGapError => {
                let value = v
                    .safe_bound
                    .as_ref()
                    .expect("gap errors carry the node's exact LP value");
                if let Some(fb) = final_best {
                    if ExtendedRational::Finite(fb.clone()) <= *value {
                        v.class = VerdictClass::WeakGapError;
                    }
                }
            }
            _ => {}
        }
    }
}

/// The safe enclosure derived from a verified log.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalInterval {
    pub zhat: ExtendedRational,
    pub zstar: f64,
    pub exact_primal: ExtendedRational,
}

/// Fold the verdicts into `[ẑ, z*]`: ẑ is the minimum of every error
/// leaf's exact payload and the exactly completed primal bound. Weak
/// errors' payloads provably sit at or above the exact primal bound, so
/// with no strong errors ẑ collapses onto it.
pub fn global_bound_interval(verdicts: &[LeafVerdict], zstar: f64) -> GlobalInterval {
    let mut exact_primal = ExtendedRational::PosInf;
    for v in verdicts {
        if let Some(inc) = &v.exact_incumbent {
            let obj = ExtendedRational::Finite(inc.objective.clone());
            exact_primal = exact_primal.min(obj);
        }
    }
    let mut zhat = exact_primal.clone();
    for v in verdicts {
        if v.class.is_error() {
            let payload = v
                .safe_bound
                .clone()
                .expect("error verdicts carry their exact payload");
            zhat = zhat.min(payload);
        }
    }
    GlobalInterval {
        zhat,
        zstar,
        exact_primal,
    }
}

/// Verify every leaf of an event log, hindsight-classify, and summarize.
///
/// `zstar` is the solver's claimed incumbent objective (`+∞` if none);
/// `events` is the full log — incumbent announcements are skipped.
pub fn verify_log(
    p: &MipProblem,
    events: &[BnbEvent],
    zstar: f64,
    params: &VerifyParams,
) -> Result<VerificationReport, VerifyError> {
    let mut verdicts = Vec::new();
    for event in events {
        if matches!(event.kind, BnbEventKind::BestSolution { .. }) {
            continue;
        }
        verdicts.push(verify_leaf(p, event, params)?);
    }
    Ok(assemble_report(verdicts, zstar))
}

/// Hindsight-classify per-leaf verdicts, tally them, and attach the global
/// interval. This is the sequential tail of [`verify_log`]; callers that
/// produce the verdicts themselves (e.g. from a worker pool) get the same
/// report as long as the verdicts arrive in log order.
pub fn assemble_report(mut verdicts: Vec<LeafVerdict>, zstar: f64) -> VerificationReport {
    classify_hindsight(&mut verdicts);

    let mut class_counts = ClassCounts::default();
    let mut technique_counts = TechniqueCounts::default();
    for v in &verdicts {
        match v.class {
            VerdictClass::Verified => class_counts.verified += 1,
            VerdictClass::WeakSolutionError => class_counts.solution_weak += 1,
            VerdictClass::StrongSolutionError => class_counts.solution_strong += 1,
            VerdictClass::WeakBoundError => class_counts.bound_weak += 1,
            VerdictClass::StrongBoundError => class_counts.bound_strong += 1,
            VerdictClass::WeakGapError => class_counts.gap_weak += 1,
            VerdictClass::StrongGapError => class_counts.gap_strong += 1,
            VerdictClass::InfeasibilityError => class_counts.infeasibility += 1,
            VerdictClass::Inconclusive => class_counts.inconclusive += 1,
            VerdictClass::IterationLimit => class_counts.iteration_limit += 1,
        }
        match v.technique {
            Some(Technique::SafeBounding) => technique_counts.safe_bounding += 1,
            Some(Technique::Reconstruction) => technique_counts.reconstruction += 1,
            Some(Technique::Factorization) => technique_counts.factorization += 1,
            Some(Technique::ExactLp) => technique_counts.exact_lp += 1,
            None => {}
        }
    }

    let interval = global_bound_interval(&verdicts, zstar);
    VerificationReport {
        verdicts,
        class_counts,
        technique_counts,
        zhat: interval.zhat,
        zstar: interval.zstar,
        exact_primal: interval.exact_primal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bnb::{solve_bnb, BnbLimits, BnbTolerances, NodePath};
    use crate::model::SparseRow;
    use crate::simplex_fp::{RowStatus, VarStatus};
    use alloc::borrow::ToOwned;
    use alloc::vec;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn rq(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn fin(v: i64) -> ExtendedRational {
        ExtendedRational::from_int(v)
    }

    fn model(
        cost: Vec<Rational>,
        rows: Vec<(Vec<(usize, Rational)>, Rational)>,
        lower: Vec<ExtendedRational>,
        upper: Vec<ExtendedRational>,
        integer: Vec<bool>,
    ) -> MipProblem {
        let n = cost.len();
        let n_rows = rows.len();
        MipProblem {
            name: "t".to_owned(),
            objective: cost,
            objective_offset: Rational::zero(),
            maximize: false,
            rows: rows
                .iter()
                .map(|(entries, _)| SparseRow::new(entries.clone()))
                .collect(),
            rhs: rows.into_iter().map(|(_, b)| b).collect(),
            lower,
            upper,
            integer,
            var_names: (0..n).map(|j| alloc::format!("x{j}")).collect(),
            row_names: (0..n_rows).map(|i| alloc::format!("r{i}")).collect(),
        }
    }

    fn root_event(primal_bound: f64, kind: BnbEventKind) -> BnbEvent {
        BnbEvent {
            seq: 0,
            path: NodePath {
                steps: vec![],
                node_id: 0,
                parent_id: None,
                depth: 0,
            },
            primal_bound_at_event: primal_bound,
            kind,
        }
    }

    // min −x over x ∈ [0,1] with no rows; the exact dual is r⁻ = 1.
    fn box_model() -> MipProblem {
        model(
            vec![r(-1)],
            vec![],
            vec![fin(0)],
            vec![fin(1)],
            vec![false],
        )
    }

    #[test]
    fn exact_duals_give_the_exact_bound() {
        let p = box_model();
        let b = VarBounds::of_model(&p);
        let cert = safe_dual_bound(&p, &b, &[], &[0.0], &[1.0], 1e-9).unwrap();
        assert_eq!(cert.safe_bound, fin(-1));
        assert_eq!(cert.r_neg, vec![r(1)]);
        assert_eq!(cert.r_pos, vec![r(0)]);
    }

    #[test]
    fn perturbed_multiplier_costs_exactly_the_residual() {
        // r̂⁻ = 1 + 1e-7 overshoots; the repair adds the overshoot to r⁺
        // and the bound drops to −1 − 1e-7 (in exact float-value terms).
        let p = box_model();
        let b = VarBounds::of_model(&p);
        let w = Rational::from_f64(1.0 + 1e-7).unwrap();
        let cert = safe_dual_bound(&p, &b, &[], &[0.0], &[1.0 + 1e-7], 1e-9).unwrap();
        assert_eq!(cert.safe_bound, ExtendedRational::Finite(-w.clone()));
        assert_eq!(cert.r_pos, vec![&w - &r(1)]);
        assert_eq!(cert.r_neg, vec![w]);
    }

    #[test]
    fn multiplier_against_infinite_bound_collapses_to_minus_infinity() {
        let p = model(
            vec![r(-1)],
            vec![],
            vec![fin(0)],
            vec![ExtendedRational::PosInf],
            vec![false],
        );
        let b = VarBounds::of_model(&p);
        let cert = safe_dual_bound(&p, &b, &[], &[0.0], &[1.0], 1e-9).unwrap();
        assert_eq!(cert.safe_bound, ExtendedRational::NegInf);
    }

    #[test]
    fn clamping_accepts_noise_and_rejects_violations() {
        let p = box_model();
        let b = VarBounds::of_model(&p);
        // −1e-10 is inside the zero tolerance: clamped to 0, then the
        // residual repair rebuilds r⁻ = 1 from scratch.
        let cert = safe_dual_bound(&p, &b, &[], &[0.0], &[-1e-10], 1e-9).unwrap();
        assert_eq!(cert.safe_bound, fin(-1));
        // −1e-6 is a genuine violation: no certificate at this level.
        assert!(safe_dual_bound(&p, &b, &[], &[0.0], &[-1e-6], 1e-9).is_none());
    }

    #[test]
    fn farkas_margin_matches_hand_computation() {
        // x ≥ 1 and −x ≥ 0 over [0,1]: ray (1,1) gives z = 0, margin 1.
        let p = model(
            vec![r(0)],
            vec![
                (vec![(0, r(1))], r(1)),
                (vec![(0, r(-1))], r(0)),
            ],
            vec![fin(0)],
            vec![fin(1)],
            vec![false],
        );
        let b = VarBounds::of_model(&p);
        assert_eq!(validate_farkas(&p, &b, &[1.0, 1.0], 1e-9), Some(r(1)));
        // Scaling the ray scales the margin.
        assert_eq!(validate_farkas(&p, &b, &[2.0, 2.0], 1e-9), Some(r(2)));
        // The zero ray certifies nothing.
        assert_eq!(validate_farkas(&p, &b, &[0.0, 0.0], 1e-9), None);
    }

    #[test]
    fn farkas_against_infinite_box_is_undecided() {
        // z has a positive entry but u = +∞, so the box maximum diverges.
        let p = model(
            vec![r(0)],
            vec![(vec![(0, r(1))], r(2)), (vec![(0, r(-1))], r(-1))],
            vec![fin(0)],
            vec![ExtendedRational::PosInf],
            vec![false],
        );
        let b = VarBounds::of_model(&p);
        assert_eq!(validate_farkas(&p, &b, &[1.0, 0.0], 1e-9), None);
    }

    fn single_row_basis() -> Basis {
        Basis {
            vars: vec![VarStatus::Basic],
            rows: vec![RowStatus::AtLower],
        }
    }

    #[test]
    fn prune_at_exactly_the_primal_bound_is_verified() {
        // min x, row x ≥ 10, pruned against π = 10: the boundary holds.
        let p = model(
            vec![r(1)],
            vec![(vec![(0, r(1))], r(10))],
            vec![fin(0)],
            vec![fin(20)],
            vec![false],
        );
        let ev = root_event(
            10.0,
            BnbEventKind::NodeInfeasible {
                reason: NodeInfeasibleReason::PrunedAfterSolve {
                    lp: LpRecord {
                        objective: 10.0,
                        x: vec![10.0],
                        y: vec![1.0],
                        reduced: vec![0.0],
                        basis: single_row_basis(),
                    },
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::Verified);
        assert_eq!(v.technique, Some(Technique::SafeBounding));
        assert_eq!(v.safe_bound, Some(fin(10)));
    }

    #[test]
    fn prune_below_the_primal_bound_is_a_bound_error() {
        // The exact row is x ≥ 10 − 1e-7 while the recorded fp objective
        // 10 + 1e-7 cleared π = 10; factorization exposes the exact value.
        let rhs = &r(10) - &rq(1, 10_000_000);
        let p = model(
            vec![r(1)],
            vec![(vec![(0, r(1))], rhs.clone())],
            vec![fin(0)],
            vec![fin(20)],
            vec![false],
        );
        let kind = BnbEventKind::NodeInfeasible {
            reason: NodeInfeasibleReason::PrunedAfterSolve {
                lp: LpRecord {
                    objective: 10.0 + 1e-7,
                    x: vec![10.0 + 1e-7],
                    y: vec![1.0],
                    reduced: vec![0.0],
                    basis: single_row_basis(),
                },
            },
        };
        let v = verify_leaf(&p, &root_event(10.0, kind.clone()), &VerifyParams::default())
            .unwrap();
        assert_eq!(v.class, VerdictClass::StrongBoundError);
        assert_eq!(v.technique, Some(Technique::Factorization));
        assert_eq!(v.safe_bound, Some(ExtendedRational::Finite(rhs)));

        // Capped below factorization the same leaf stays undecided.
        for cap in [Technique::SafeBounding, Technique::Reconstruction] {
            let params = VerifyParams {
                level_cap: cap,
                ..VerifyParams::default()
            };
            let v = verify_leaf(&p, &root_event(10.0, kind.clone()), &params).unwrap();
            assert_eq!(v.class, VerdictClass::Inconclusive);
            assert_eq!(v.technique, None);
        }
        let params = VerifyParams {
            level_cap: Technique::Factorization,
            ..VerifyParams::default()
        };
        let v = verify_leaf(&p, &root_event(10.0, kind), &params).unwrap();
        assert_eq!(v.class, VerdictClass::StrongBoundError);
    }

    #[test]
    fn integer_leaf_verifies_by_the_squeeze() {
        // min −x, x binary: recorded optimum x̂ = 1 completes exactly, and
        // the repaired dual bound −1 pins the node value onto it.
        let p = model(
            vec![r(-1)],
            vec![],
            vec![fin(0)],
            vec![fin(1)],
            vec![true],
        );
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::NodeFeasible {
                lp: LpRecord {
                    objective: -1.0,
                    x: vec![1.0],
                    y: vec![],
                    reduced: vec![-1.0],
                    basis: Basis {
                        vars: vec![VarStatus::AtUpper],
                        rows: vec![],
                    },
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::Verified);
        assert_eq!(v.technique, Some(Technique::SafeBounding));
        let inc = v.exact_incumbent.unwrap();
        assert_eq!(inc.x, vec![r(1)]);
        assert_eq!(inc.objective, r(-1));
    }

    #[test]
    fn impossible_completion_on_feasible_node_is_a_strong_solution_error() {
        // min −x with 2·10⁶ x ≤ 2·10⁶ − 1: the LP optimum 1 − 5e-7 is
        // integral within 1e-6, but x = 1 violates the row exactly.
        let p = model(
            vec![r(-1)],
            vec![(vec![(0, r(-2_000_000))], r(-1_999_999))],
            vec![fin(0)],
            vec![fin(1)],
            vec![true],
        );
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::NodeFeasible {
                lp: LpRecord {
                    objective: -0.9999995,
                    x: vec![0.9999995],
                    y: vec![5e-7],
                    reduced: vec![0.0],
                    basis: single_row_basis(),
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::StrongSolutionError);
        assert_eq!(v.technique, Some(Technique::ExactLp));
        // Payload: the node's exact LP value −(2·10⁶ − 1)/2·10⁶.
        assert_eq!(
            v.safe_bound,
            Some(ExtendedRational::Finite(-rq(1_999_999, 2_000_000)))
        );
        assert!(v.exact_incumbent.is_none());
    }

    #[test]
    fn impossible_completion_on_empty_node_is_a_weak_solution_error() {
        // x ≥ 1 − 5e-7 and x ≤ 1 − 9e-7 cross exactly; the recorded point
        // satisfied both within feastol. Rounding to 1 cannot complete,
        // and the node is exactly empty, so nothing was lost.
        let p = model(
            vec![r(-1)],
            vec![
                (vec![(0, r(1))], rq(9_999_995, 10_000_000)),
                (vec![(0, r(-1))], -rq(9_999_991, 10_000_000)),
            ],
            vec![fin(0)],
            vec![fin(1)],
            vec![true],
        );
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::NodeFeasible {
                lp: LpRecord {
                    objective: -0.9999991,
                    x: vec![0.9999991],
                    y: vec![0.0, 1.0],
                    reduced: vec![0.0],
                    basis: Basis {
                        vars: vec![VarStatus::Basic],
                        rows: vec![RowStatus::Basic, RowStatus::AtLower],
                    },
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::WeakSolutionError);
        assert_eq!(v.safe_bound, Some(ExtendedRational::PosInf));
    }

    #[test]
    fn valid_float_ray_verifies_an_infeasible_leaf() {
        let p = model(
            vec![r(0)],
            vec![(vec![(0, r(1))], r(1)), (vec![(0, r(-1))], r(0))],
            vec![fin(0)],
            vec![fin(1)],
            vec![false],
        );
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::NodeInfeasible {
                reason: NodeInfeasibleReason::LpInfeasible {
                    farkas_ray: vec![1.0, 1.0],
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::Verified);
        assert_eq!(v.technique, Some(Technique::SafeBounding));
        assert_eq!(v.safe_bound, Some(ExtendedRational::PosInf));
    }

    #[test]
    fn infeasible_claim_on_feasible_node_is_an_infeasibility_error() {
        // min x with x ≥ 1/2 is exactly feasible; no ray can certify.
        let p = model(
            vec![r(1)],
            vec![(vec![(0, r(1))], rq(1, 2))],
            vec![fin(0)],
            vec![fin(1)],
            vec![false],
        );
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::NodeInfeasible {
                reason: NodeInfeasibleReason::LpInfeasible {
                    farkas_ray: vec![1.0],
                },
            },
        );
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::InfeasibilityError);
        assert_eq!(v.technique, Some(Technique::ExactLp));
        assert_eq!(v.safe_bound, Some(ExtendedRational::Finite(rq(1, 2))));
    }

    #[test]
    fn deleted_node_resolves_and_verifies() {
        // min x over [0,1] re-solves to 0 ≥ π = −1/2: the deletion held.
        let p = model(vec![r(1)], vec![], vec![fin(0)], vec![fin(1)], vec![false]);
        let ev = root_event(-0.5, BnbEventKind::NodeDeleted);
        let v = verify_leaf(&p, &ev, &VerifyParams::default()).unwrap();
        assert_eq!(v.class, VerdictClass::Verified);
        assert_eq!(v.technique, Some(Technique::SafeBounding));
        assert_eq!(v.safe_bound, Some(fin(0)));
    }

    #[test]
    fn deleted_node_iteration_limit_is_reported_separately() {
        // The re-solve needs at least one pivot to reach x = 10, so an
        // iteration budget of zero stops it.
        let p = model(
            vec![r(1)],
            vec![(vec![(0, r(1))], r(10))],
            vec![fin(0)],
            vec![fin(20)],
            vec![false],
        );
        let ev = root_event(-0.5, BnbEventKind::NodeDeleted);
        let params = VerifyParams {
            lp_iteration_limit: 0,
            ..VerifyParams::default()
        };
        let v = verify_leaf(&p, &ev, &params).unwrap();
        assert_eq!(v.class, VerdictClass::IterationLimit);
        assert_eq!(v.technique, None);
        assert_eq!(v.safe_bound, None);
    }

    #[test]
    fn incumbent_events_are_not_leaves() {
        let p = box_model();
        let ev = root_event(
            f64::INFINITY,
            BnbEventKind::BestSolution {
                x: vec![1.0],
                objective: -1.0,
            },
        );
        assert!(verify_leaf(&p, &ev, &VerifyParams::default()).is_err());
    }

    fn bound_error_verdict(seq: u64, bound: ExtendedRational) -> LeafVerdict {
        LeafVerdict {
            seq,
            node_id: seq,
            class: VerdictClass::StrongBoundError,
            technique: Some(Technique::ExactLp),
            safe_bound: Some(bound),
            exact_incumbent: None,
        }
    }

    fn incumbent_verdict(seq: u64, objective: Rational) -> LeafVerdict {
        LeafVerdict {
            seq,
            node_id: seq,
            class: VerdictClass::Verified,
            technique: Some(Technique::SafeBounding),
            safe_bound: Some(ExtendedRational::Finite(objective.clone())),
            exact_incumbent: Some(ExactIncumbent {
                x: vec![],
                objective,
            }),
        }
    }

    #[test]
    fn hindsight_justifies_bound_errors_reached_later() {
        // Bound 5 pruned too early, but a later incumbent reaches 5:
        // weak. With best-ever 6 it stays strong.
        let mut vs = vec![bound_error_verdict(3, fin(5)), incumbent_verdict(7, r(5))];
        classify_hindsight(&mut vs);
        assert_eq!(vs[0].class, VerdictClass::WeakBoundError);

        let mut vs = vec![bound_error_verdict(3, fin(5)), incumbent_verdict(7, r(6))];
        classify_hindsight(&mut vs);
        assert_eq!(vs[0].class, VerdictClass::StrongBoundError);

        // An incumbent before the prune cannot justify it.
        let mut vs = vec![bound_error_verdict(3, fin(5)), incumbent_verdict(1, r(5))];
        classify_hindsight(&mut vs);
        assert_eq!(vs[0].class, VerdictClass::StrongBoundError);
    }

    #[test]
    fn hindsight_justifies_gap_errors_by_the_final_primal() {
        let gap = |value: ExtendedRational| LeafVerdict {
            seq: 2,
            node_id: 2,
            class: VerdictClass::StrongGapError,
            technique: Some(Technique::Factorization),
            safe_bound: Some(value),
            exact_incumbent: Some(ExactIncumbent {
                x: vec![],
                objective: r(9),
            }),
        };
        // Node LP value 4, final exact primal 4 (from another leaf): weak.
        let mut vs = vec![gap(fin(4)), incumbent_verdict(5, r(4))];
        classify_hindsight(&mut vs);
        assert_eq!(vs[0].class, VerdictClass::WeakGapError);
        // Final exact primal 5 > 4: strong.
        let mut vs = vec![gap(fin(4)), incumbent_verdict(5, r(5))];
        classify_hindsight(&mut vs);
        assert_eq!(vs[0].class, VerdictClass::StrongGapError);
    }

    #[test]
    fn interval_examples() {
        // No errors: ẑ collapses onto the exact primal bound 13.75.
        let vs = vec![incumbent_verdict(1, rq(55, 4))];
        let g = global_bound_interval(&vs, 13.75);
        assert_eq!(g.zhat, ExtendedRational::Finite(rq(55, 4)));
        assert_eq!(g.exact_primal, ExtendedRational::Finite(rq(55, 4)));

        // One strong bound error at 13.5 pulls ẑ down to it.
        let vs = vec![
            incumbent_verdict(1, rq(55, 4)),
            bound_error_verdict(2, ExtendedRational::Finite(rq(27, 2))),
        ];
        let g = global_bound_interval(&vs, 13.75);
        assert_eq!(g.zhat, ExtendedRational::Finite(rq(27, 2)));

        // A −∞ payload dominates everything.
        let vs = vec![
            bound_error_verdict(1, fin(10)),
            bound_error_verdict(2, ExtendedRational::NegInf),
        ];
        let g = global_bound_interval(&vs, f64::INFINITY);
        assert_eq!(g.zhat, ExtendedRational::NegInf);
        assert_eq!(g.exact_primal, ExtendedRational::PosInf);
    }

    #[test]
    fn gap_error_surfaces_through_the_full_pipeline() {
        // min −x + 1.001 s with x − s ≤ 1 − 5e-7, x binary: the LP optimum
        // x = 1 − 5e-7 is integral within tolerance, the completion fixes
        // x = 1 at exact cost 5e-10 above the node value.
        let rhs = -rq(9_999_995, 10_000_000);
        let p = model(
            vec![r(-1), rq(1001, 1000)],
            vec![(vec![(0, r(-1)), (1, r(1))], rhs.clone())],
            vec![fin(0), fin(0)],
            vec![fin(1), fin(1)],
            vec![true, false],
        );
        let out = solve_bnb(&p, &BnbTolerances::default(), &BnbLimits::default()).unwrap();
        let report =
            verify_log(&p, &out.events, out.incumbent_objective, &VerifyParams::default())
                .unwrap();

        assert_eq!(report.class_counts.total(), 1);
        assert_eq!(report.class_counts.gap_strong, 1);
        let v = &report.verdicts[0];
        // Payload: the node's exact LP value −(1 − 5e-7).
        assert_eq!(v.safe_bound, Some(ExtendedRational::Finite(rhs.clone())));
        // The completion x = 1, s = 5e-7 is recorded as an exact incumbent.
        let inc = v.exact_incumbent.as_ref().unwrap();
        assert_eq!(inc.x[0], r(1));
        assert_eq!(inc.x[1], rq(5, 10_000_000));
        let completion_obj = &(-r(1)) + &(&rq(1001, 1000) * &rq(5, 10_000_000));
        assert_eq!(inc.objective, completion_obj);
        // ẑ is the node value; the exact primal bound is the completion.
        assert_eq!(report.zhat, ExtendedRational::Finite(rhs));
        assert_eq!(
            report.exact_primal,
            ExtendedRational::Finite(completion_obj)
        );
        assert!(!report.fully_verified());
    }

    #[test]
    fn trivial_run_is_fully_verified() {
        let p = model(
            vec![r(-1)],
            vec![],
            vec![fin(0)],
            vec![fin(1)],
            vec![true],
        );
        let out = solve_bnb(&p, &BnbTolerances::default(), &BnbLimits::default()).unwrap();
        let report =
            verify_log(&p, &out.events, out.incumbent_objective, &VerifyParams::default())
                .unwrap();
        assert!(report.fully_verified());
        assert_eq!(report.class_counts.verified, 1);
        assert_eq!(report.technique_counts.safe_bounding, 1);
        assert_eq!(report.zhat, fin(-1));
        assert_eq!(report.exact_primal, fin(-1));
        assert_eq!(report.zstar, -1.0);
        assert_eq!(report.exact_incumbent_objective(), Some(&r(-1)));
    }
}
