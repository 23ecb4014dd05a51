//! LP-based branch-and-bound over the floating-point simplex, with a
//! complete leaf-event log.
//!
//! The driver is deliberately plain: best-first search, most-fractional
//! branching, no cuts, no propagation, no heuristics. Every decision that
//! removes a subtree from consideration — an LP declared infeasible, a node
//! pruned against the incumbent, a queued node deleted after an incumbent
//! update, or an LP solution accepted as integral — is recorded as an event
//! carrying everything an auditor needs to re-examine the decision in exact
//! arithmetic.
//!
//! Conventions fixed here (they shape the event log deterministically):
//! - Children are created floor-side first (`x ≤ ⌊x̂⌋` gets the smaller id),
//!   and both inherit the parent's LP objective as their initial lower
//!   bound; a node's own LP is solved when it is popped.
//! - The queue pops the smallest lower bound; ties prefer the deeper node,
//!   then the smaller node id.
//! - The prune test runs before the integrality test, so every accepted
//!   integral solution strictly improves the incumbent.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::model::{MipProblem, VarBounds};
use crate::rational::{ExtendedRational, Rational};
use crate::simplex_fp::{solve_lp_fp, Basis, FpLpStatus, FpTolerances};

/// Direction of one branching bound change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchDir {
    /// `x_j ≥ ⌈x̂_j⌉` — the variable's lower bound was raised.
    GeCeil,
    /// `x_j ≤ ⌊x̂_j⌋` — the variable's upper bound was lowered.
    LeFloor,
}

/// One branching step: the effective bound imposed on a variable.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchStep {
    pub var: usize,
    pub dir: BranchDir,
    /// The bound value actually in force after the step (already folded
    /// with the parent bound, so replaying steps is a plain assignment).
    pub bound: Rational,
}

/// Identity and ancestry of a node, plus the bound changes that define it.
#[derive(Clone, Debug, PartialEq)]
pub struct NodePath {
    pub steps: Vec<BranchStep>,
    pub node_id: u64,
    pub parent_id: Option<u64>,
    pub depth: u32,
}

impl NodePath {
    /// Replay the path: apply every branching step to the model's bounds.
    /// Reproduces the node's local bounds exactly.
    pub fn local_bounds(&self, p: &MipProblem) -> VarBounds {
        let mut b = VarBounds::of_model(p);
        for s in &self.steps {
            match s.dir {
                BranchDir::GeCeil => b.lower[s.var] = ExtendedRational::Finite(s.bound.clone()),
                BranchDir::LeFloor => b.upper[s.var] = ExtendedRational::Finite(s.bound.clone()),
            }
        }
        b
    }
}

/// Full record of an LP solved to (claimed) optimality at a node.
#[derive(Clone, Debug, PartialEq)]
pub struct LpRecord {
    /// `cᵀx̂` as the solver reported it.
    pub objective: f64,
    /// Structural primal values.
    pub x: Vec<f64>,
    /// Row duals.
    pub y: Vec<f64>,
    /// Signed reduced costs per structural variable.
    pub reduced: Vec<f64>,
    pub basis: Basis,
}

/// Why a node was discarded, and the evidence the solver left behind.
#[derive(Clone, Debug, PartialEq)]
pub enum NodeInfeasibleReason {
    /// The LP relaxation was declared infeasible; the phase-1 duals form
    /// the claimed Farkas certificate.
    LpInfeasible { farkas_ray: Vec<f64> },
    /// The LP solved to optimality but its value could not beat the
    /// incumbent (pruned after solve).
    PrunedAfterSolve { lp: LpRecord },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BnbEventKind {
    /// The node's LP solution was accepted as integral (a MIP solution).
    NodeFeasible { lp: LpRecord },
    /// The node was discarded: LP infeasible, or pruned after solving.
    NodeInfeasible { reason: NodeInfeasibleReason },
    /// The node was removed from the queue by an incumbent update without
    /// ever solving its LP. Only the path and the bound are recorded;
    /// auditing re-solves the LP from the path.
    NodeDeleted,
    /// A new incumbent was accepted (emitted just before the node's own
    /// `NodeFeasible` event).
    BestSolution { x: Vec<f64>, objective: f64 },
}

/// One entry of the event log.
#[derive(Clone, Debug, PartialEq)]
pub struct BnbEvent {
    /// Strictly increasing emission index.
    pub seq: u64,
    pub path: NodePath,
    /// The incumbent objective in effect at emission time (`+∞` if none).
    pub primal_bound_at_event: f64,
    pub kind: BnbEventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnbStatus {
    Optimal,
    Infeasible,
    TimeLimit,
    NodeLimit,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BnbStats {
    /// Nodes whose LP was solved.
    pub nodes_processed: u64,
    /// Nodes ever created (root plus two per branching).
    pub nodes_created: u64,
    /// Nodes that produced children.
    pub branched: u64,
    pub leaves_feasible: u64,
    pub leaves_lp_infeasible: u64,
    pub leaves_pruned: u64,
    pub leaves_deleted: u64,
    /// Nodes still queued when the search stopped (only under limits).
    pub unprocessed: u64,
    /// Wall time reported by the caller's clock, if one was supplied.
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BnbOutcome {
    pub status: BnbStatus,
    /// Best integral solution found, as raw floats from the LP solver.
    pub incumbent: Option<Vec<f64>>,
    /// Objective of the incumbent (`+∞` when none); excludes the model's
    /// objective offset, like every other internal objective value.
    pub incumbent_objective: f64,
    pub events: Vec<BnbEvent>,
    pub stats: BnbStats,
}

/// Search tolerances. `inttol` bounds the accepted fractionality of an
/// integer variable; `zerotol` is the equality slack in prune comparisons.
#[derive(Clone, Copy, Debug)]
pub struct BnbTolerances {
    pub feastol: f64,
    pub inttol: f64,
    pub zerotol: f64,
}

impl Default for BnbTolerances {
    fn default() -> Self {
        BnbTolerances {
            feastol: 1e-6,
            inttol: 1e-6,
            zerotol: 1e-9,
        }
    }
}

/// Resource limits. The clock is injected so the core stays free of any
/// time source; without one, the time limit is simply never triggered.
pub struct BnbLimits<'a> {
    pub node_limit: Option<u64>,
    pub time_limit: Option<f64>,
    /// Seconds elapsed since the start of the solve, by the caller's watch.
    pub clock: Option<&'a dyn Fn() -> f64>,
    /// Per-LP simplex iteration cap; exceeding it aborts the whole solve
    /// (the node could be neither pruned nor branched honestly).
    pub lp_iteration_limit: u64,
}

impl Default for BnbLimits<'_> {
    fn default() -> Self {
        BnbLimits {
            node_limit: None,
            time_limit: None,
            clock: None,
            lp_iteration_limit: u64::MAX,
        }
    }
}

/// Conditions under which no honest outcome can be reported at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BnbAbort {
    /// A node LP was reported unbounded; with a bounded root this cannot
    /// happen, so it always denotes an unbounded relaxation.
    UnboundedRelaxation { node_id: u64 },
    /// A node LP hit the per-LP iteration cap (or a singular-basis
    /// breakdown); the node cannot be classified, so nothing is fabricated.
    LpIterationLimit { node_id: u64 },
}

impl fmt::Display for BnbAbort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BnbAbort::UnboundedRelaxation { node_id } => {
                write!(f, "LP relaxation unbounded at node {node_id}")
            }
            BnbAbort::LpIterationLimit { node_id } => {
                write!(f, "LP iteration limit hit at node {node_id}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BnbAbort {}

fn fractionality(v: f64) -> f64 {
    let fr = v - libm::floor(v);
    fr.min(1.0 - fr)
}

/// Most-fractional branching: the integer variable maximizing
/// `min(x̂_j − ⌊x̂_j⌋, ⌈x̂_j⌉ − x̂_j)`, ties to the lowest index. `None`
/// when every integer variable is within `inttol` of an integer.
pub fn choose_branch_variable(x: &[f64], integer: &[bool], inttol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (j, v) in x.iter().enumerate() {
        if !integer[j] {
            continue;
        }
        let f = fractionality(*v);
        if f <= inttol {
            continue;
        }
        match best {
            Some((_, bf)) if !(f > bf) => {}
            _ => best = Some((j, f)),
        }
    }
    best.map(|(j, _)| j)
}

struct PendingNode {
    path: NodePath,
    bounds: VarBounds,
    /// Initial lower bound inherited from the parent's LP objective.
    lb: f64,
}

/// Queue ordering: smallest lower bound first, then deepest, then smallest
/// node id. `BinaryHeap` is a max-heap, so "pops next" must compare as
/// greatest.
struct QueueEntry(PendingNode);

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .lb
            .partial_cmp(&self.0.lb)
            .expect("node lower bounds are never NaN")
            .then_with(|| self.0.path.depth.cmp(&other.0.path.depth))
            .then_with(|| other.0.path.node_id.cmp(&self.0.path.node_id))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

/// Solve the MIP `min cᵀx, Ax ≥ b, ℓ ≤ x ≤ u, x_I integral` by LP-based
/// branch-and-bound, recording every leaf decision.
///
/// The model must be normalized (consistent bounds; integral bounds on
/// integer variables — `cleanup_model` establishes both). The returned
/// objective values exclude the model's objective offset.
pub fn solve_bnb(
    p: &MipProblem,
    tol: &BnbTolerances,
    limits: &BnbLimits,
) -> Result<BnbOutcome, BnbAbort> {
    let fp_tol = FpTolerances {
        feastol: tol.feastol,
        zerotol: tol.zerotol,
        ..FpTolerances::default()
    };

    let mut stats = BnbStats::default();
    let mut events: Vec<BnbEvent> = Vec::new();
    let mut seq = 0u64;
    let mut incumbent: Option<Vec<f64>> = None;
    let mut primal_bound = f64::INFINITY;
    let mut next_id = 1u64;

    let root = PendingNode {
        path: NodePath {
            steps: Vec::new(),
            node_id: 0,
            parent_id: None,
            depth: 0,
        },
        bounds: VarBounds::of_model(p),
        lb: f64::NEG_INFINITY,
    };
    debug_assert!(root.bounds.is_consistent(), "model not normalized");
    let mut queue: BinaryHeap<QueueEntry> = BinaryHeap::new();
    queue.push(QueueEntry(root));
    stats.nodes_created = 1;

    let mut limit_status: Option<BnbStatus> = None;
    loop {
        if queue.is_empty() {
            break;
        }
        if let Some(nl) = limits.node_limit {
            if stats.nodes_processed >= nl {
                limit_status = Some(BnbStatus::NodeLimit);
                break;
            }
        }
        if let (Some(tl), Some(clock)) = (limits.time_limit, limits.clock) {
            if clock() >= tl {
                limit_status = Some(BnbStatus::TimeLimit);
                break;
            }
        }
        let node = queue.pop().expect("checked non-empty").0;
        stats.nodes_processed += 1;

        let lp = solve_lp_fp(p, &node.bounds, &fp_tol, limits.lp_iteration_limit);
        match lp.status {
            FpLpStatus::Unbounded => {
                return Err(BnbAbort::UnboundedRelaxation {
                    node_id: node.path.node_id,
                });
            }
            FpLpStatus::IterationLimit => {
                return Err(BnbAbort::LpIterationLimit {
                    node_id: node.path.node_id,
                });
            }
            FpLpStatus::Infeasible => {
                stats.leaves_lp_infeasible += 1;
                events.push(BnbEvent {
                    seq,
                    path: node.path,
                    primal_bound_at_event: primal_bound,
                    kind: BnbEventKind::NodeInfeasible {
                        reason: NodeInfeasibleReason::LpInfeasible {
                            farkas_ray: lp.farkas_ray.expect("infeasible LPs carry a ray"),
                        },
                    },
                });
                seq += 1;
            }
            FpLpStatus::Optimal => {
                let record = || LpRecord {
                    objective: lp.objective,
                    x: lp.x.clone(),
                    y: lp.y.clone(),
                    reduced: lp
                        .r_pos
                        .iter()
                        .zip(&lp.r_neg)
                        .map(|(pl, mi)| pl - mi)
                        .collect(),
                    basis: lp.basis.clone().expect("optimal LPs carry a basis"),
                };
                if lp.objective >= primal_bound - tol.zerotol {
                    stats.leaves_pruned += 1;
                    events.push(BnbEvent {
                        seq,
                        path: node.path,
                        primal_bound_at_event: primal_bound,
                        kind: BnbEventKind::NodeInfeasible {
                            reason: NodeInfeasibleReason::PrunedAfterSolve { lp: record() },
                        },
                    });
                    seq += 1;
                } else if let Some(j) = choose_branch_variable(&lp.x, &p.integer, tol.inttol) {
                    stats.branched += 1;
                    stats.nodes_created += 2;
                    let xv = lp.x[j];
                    let lo = Rational::from_f64(libm::floor(xv)).expect("LP values are finite");
                    let hi = Rational::from_f64(libm::ceil(xv)).expect("LP values are finite");
                    // Floor child first: it receives the smaller node id.
                    for (dir, v) in [(BranchDir::LeFloor, lo), (BranchDir::GeCeil, hi)] {
                        let mut bounds = node.bounds.clone();
                        let eff = match dir {
                            BranchDir::LeFloor => {
                                let u = bounds.upper[j]
                                    .clone()
                                    .min(ExtendedRational::Finite(v));
                                bounds.upper[j] = u.clone();
                                u
                            }
                            BranchDir::GeCeil => {
                                let l = bounds.lower[j]
                                    .clone()
                                    .max(ExtendedRational::Finite(v));
                                bounds.lower[j] = l.clone();
                                l
                            }
                        };
                        let ExtendedRational::Finite(eff) = eff else {
                            unreachable!("folding with a finite branch bound stays finite")
                        };
                        debug_assert!(bounds.is_consistent());
                        let mut steps = node.path.steps.clone();
                        steps.push(BranchStep {
                            var: j,
                            dir,
                            bound: eff,
                        });
                        queue.push(QueueEntry(PendingNode {
                            path: NodePath {
                                steps,
                                node_id: next_id,
                                parent_id: Some(node.path.node_id),
                                depth: node.path.depth + 1,
                            },
                            bounds,
                            lb: lp.objective,
                        }));
                        next_id += 1;
                    }
                } else {
                    // Not pruned and integral: a strictly improving MIP
                    // solution (the prune test already enforced the margin).
                    stats.leaves_feasible += 1;
                    events.push(BnbEvent {
                        seq,
                        path: node.path.clone(),
                        primal_bound_at_event: primal_bound,
                        kind: BnbEventKind::BestSolution {
                            x: lp.x.clone(),
                            objective: lp.objective,
                        },
                    });
                    seq += 1;
                    incumbent = Some(lp.x.clone());
                    primal_bound = lp.objective;
                    events.push(BnbEvent {
                        seq,
                        path: node.path,
                        primal_bound_at_event: primal_bound,
                        kind: BnbEventKind::NodeFeasible { lp: record() },
                    });
                    seq += 1;

                    // Remove queued nodes the new incumbent already covers.
                    let mut survivors = Vec::new();
                    let mut deleted = Vec::new();
                    for entry in queue.drain() {
                        if entry.0.lb >= primal_bound - tol.zerotol {
                            deleted.push(entry.0);
                        } else {
                            survivors.push(entry);
                        }
                    }
                    queue = BinaryHeap::from(survivors);
                    deleted.sort_by_key(|d| d.path.node_id);
                    for d in deleted {
                        stats.leaves_deleted += 1;
                        events.push(BnbEvent {
                            seq,
                            path: d.path,
                            primal_bound_at_event: primal_bound,
                            kind: BnbEventKind::NodeDeleted,
                        });
                        seq += 1;
                    }
                }
            }
        }
    }

    stats.unprocessed = queue.len() as u64;
    if let Some(clock) = limits.clock {
        stats.wall_seconds = clock();
    }
    let status = limit_status.unwrap_or(if incumbent.is_some() {
        BnbStatus::Optimal
    } else {
        BnbStatus::Infeasible
    });
    debug_assert!(stats.nodes_created == 1 + 2 * stats.branched);
    debug_assert!(
        stats.leaves_feasible
            + stats.leaves_lp_infeasible
            + stats.leaves_pruned
            + stats.leaves_deleted
            + stats.unprocessed
            == stats.nodes_created - stats.branched
    );
    Ok(BnbOutcome {
        status,
        incumbent,
        incumbent_objective: primal_bound,
        events,
        stats,
    })
}
