//! Generic bounded-variable two-phase primal simplex engine.
//!
//! One engine serves both LP solvers: instantiated with `f64` and small
//! positive tolerances it is the floating-point solver whose decisions get
//! audited; instantiated with [`Rational`] and all-zero tolerances it is the
//! round-off-error-free reference. Sharing the pivoting logic keeps the two
//! deterministic and comparable; their independence is established by the
//! oracle tests, not by divergent code paths.
//!
//! Conventions:
//! * the LP is `min cᵀx` over `Ax − s = b`, `ℓ ≤ x ≤ u`, `s ≥ 0` — the slack
//!   of row `i` is column `n_struct + i` with the single entry `(i, −1)`;
//! * phase 1 appends one artificial column `(i, +1)` with cost 1 per
//!   violated row and minimizes their sum; a positive optimum certifies
//!   infeasibility and its duals are the Farkas ray;
//! * every iteration refactorizes the basis with dense LU — wasteful but
//!   deterministic and entirely adequate at audit scale.

// `!(a > b)` is deliberate where `a` may be NaN: a NaN pivot or reduced
// cost must be treated as ineligible, which the negated comparison does and
// `a <= b` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use alloc::vec;
use alloc::vec::Vec;

use crate::rational::Rational;

/// Scalar abstraction: `f64` or `Rational`.
pub(crate) trait Scalar:
    Clone
    + PartialOrd
    + core::fmt::Debug
    + core::ops::Add<Output = Self>
    + core::ops::Sub<Output = Self>
    + core::ops::Mul<Output = Self>
    + core::ops::Div<Output = Self>
    + core::ops::Neg<Output = Self>
    + Sized
{
    fn zero() -> Self;
    fn one() -> Self;
    fn abs(&self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn abs(&self) -> Self {
        libm::fabs(*self)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn abs(&self) -> Self {
        Rational::abs(self)
    }
}

/// A lower or upper bound; infinities never enter arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Bnd<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S> Bnd<S> {
    pub(crate) fn as_finite(&self) -> Option<&S> {
        match self {
            Bnd::Finite(v) => Some(v),
            _ => None,
        }
    }
}

/// Where a column currently sits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ColState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column, resting at value 0.
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum EngineStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted (or, for floats, numerical breakdown of the
    /// basis factorization — same caller semantics: the result decides
    /// nothing and must not be used to prune).
    IterationLimit,
}

/// The LP in engine form. `cols` holds the `n_struct` structural columns
/// followed by exactly `m` slack columns `(i, −1)`.
pub(crate) struct EngineLp<S> {
    pub n_struct: usize,
    pub cols: Vec<Vec<(usize, S)>>,
    pub cost: Vec<S>,
    pub lb: Vec<Bnd<S>>,
    pub ub: Vec<Bnd<S>>,
    pub rhs: Vec<S>,
}

pub(crate) struct EngineParams<S> {
    /// Primal feasibility tolerance (0 for exact).
    pub feastol: S,
    /// Dual feasibility / pricing tolerance (0 for exact).
    pub opttol: S,
    /// Ratio-test and degeneracy tolerance (0 for exact).
    pub zerotol: S,
    /// LU pivot admissibility floor (0 for exact = any nonzero pivot).
    pub lu_floor: S,
    /// Bland's rule from the first iteration (exact mode); otherwise
    /// Dantzig pricing with a Bland fallback after 3·(columns) consecutive
    /// degenerate steps.
    pub bland_always: bool,
    pub iteration_limit: u64,
}

pub(crate) struct EngineOutput<S> {
    pub status: EngineStatus,
    /// `cᵀ·values` under the real (phase-2) costs at termination.
    pub objective: S,
    /// Value of every column (structural and slack) at termination.
    pub values: Vec<S>,
    /// Row duals of the final basis. When `Infeasible`, these are the
    /// phase-1 duals, i.e. the Farkas ray.
    pub duals: Vec<S>,
    /// Signed reduced costs `c_j − a_jᵀy` against `duals` (phase-1 costs
    /// when `Infeasible`).
    pub reduced: Vec<S>,
    pub state: Vec<ColState>,
    /// Phase-1 optimum when it was positive (infeasibility measure).
    #[cfg_attr(not(test), allow(dead_code))]
    pub phase1_objective: Option<S>,
    pub iterations: u64,
}

/// Dense LU with row partial pivoting: `P·B = L·U`, unit lower diagonal,
/// combined storage.
pub(crate) struct DenseLu<S> {
    m: usize,
    a: Vec<S>,
    perm: Vec<usize>,
}

impl<S: Scalar> DenseLu<S> {
    /// Factor a row-major `m×m` matrix; `None` when no admissible pivot
    /// remains (singular within `floor`).
    pub(crate) fn factor(mut a: Vec<S>, m: usize, floor: &S) -> Option<Self> {
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut best = k;
            let mut best_abs = a[k * m + k].abs();
            for r in (k + 1)..m {
                let cand = a[r * m + k].abs();
                if cand > best_abs {
                    best = r;
                    best_abs = cand;
                }
            }
            if !(best_abs > *floor) {
                return None;
            }
            if best != k {
                perm.swap(k, best);
                for c in 0..m {
                    a.swap(k * m + c, best * m + c);
                }
            }
            for r in (k + 1)..m {
                if a[r * m + k] == S::zero() {
                    continue;
                }
                let f = a[r * m + k].clone() / a[k * m + k].clone();
                for c in (k + 1)..m {
                    let delta = f.clone() * a[k * m + c].clone();
                    a[r * m + c] = a[r * m + c].clone() - delta;
                }
                a[r * m + k] = f;
            }
        }
        Some(DenseLu { m, a, perm })
    }

    /// Solve `B·x = b`.
    pub(crate) fn solve(&self, b: &[S]) -> Vec<S> {
        let m = self.m;
        let mut z: Vec<S> = (0..m).map(|k| b[self.perm[k]].clone()).collect();
        for k in 0..m {
            for c in 0..k {
                if self.a[k * m + c] == S::zero() || z[c] == S::zero() {
                    continue;
                }
                let delta = self.a[k * m + c].clone() * z[c].clone();
                z[k] = z[k].clone() - delta;
            }
        }
        for k in (0..m).rev() {
            for c in (k + 1)..m {
                if self.a[k * m + c] == S::zero() || z[c] == S::zero() {
                    continue;
                }
                let delta = self.a[k * m + c].clone() * z[c].clone();
                z[k] = z[k].clone() - delta;
            }
            z[k] = z[k].clone() / self.a[k * m + k].clone();
        }
        z
    }

    /// Solve `Bᵀ·y = c`.
    pub(crate) fn solve_transposed(&self, c: &[S]) -> Vec<S> {
        let m = self.m;
        let mut z: Vec<S> = c.to_vec();
        for k in 0..m {
            for j in 0..k {
                if self.a[j * m + k] == S::zero() || z[j] == S::zero() {
                    continue;
                }
                let delta = self.a[j * m + k].clone() * z[j].clone();
                z[k] = z[k].clone() - delta;
            }
            z[k] = z[k].clone() / self.a[k * m + k].clone();
        }
        for k in (0..m).rev() {
            for j in (k + 1)..m {
                if self.a[j * m + k] == S::zero() || z[j] == S::zero() {
                    continue;
                }
                let delta = self.a[j * m + k].clone() * z[j].clone();
                z[k] = z[k].clone() - delta;
            }
        }
        let mut y = vec![S::zero(); m];
        for k in 0..m {
            y[self.perm[k]] = z[k].clone();
        }
        y
    }
}

/// Build the dense basis matrix from sparse columns.
pub(crate) fn dense_basis<S: Scalar>(
    cols: &[Vec<(usize, S)>],
    basic_cols: &[usize],
    m: usize,
) -> Vec<S> {
    let mut a = vec![S::zero(); m * m];
    for (slot, &j) in basic_cols.iter().enumerate() {
        for (i, v) in &cols[j] {
            a[i * m + slot] = v.clone();
        }
    }
    a
}

enum LoopExit {
    Optimal,
    Unbounded,
    IterationLimit,
    /// Singular basis factorization (float-only in practice).
    Breakdown,
}

struct Workspace<S> {
    values: Vec<S>,
    state: Vec<ColState>,
    basis: Vec<usize>,
    duals: Vec<S>,
    reduced: Vec<S>,
    iterations: u64,
}

pub(crate) fn solve<S: Scalar>(lp: &EngineLp<S>, params: &EngineParams<S>) -> EngineOutput<S> {
    let m = lp.rhs.len();
    let n_struct = lp.n_struct;
    let n_total = n_struct + m;
    debug_assert_eq!(lp.cols.len(), n_total);
    debug_assert_eq!(lp.cost.len(), n_total);

    // Working copies; phase 1 may append artificial columns.
    let mut cols = lp.cols.clone();
    let mut lb = lp.lb.clone();
    let mut ub = lp.ub.clone();

    let mut ws = Workspace {
        values: Vec::with_capacity(n_total),
        state: Vec::with_capacity(n_total),
        basis: (n_struct..n_total).collect(),
        duals: vec![S::zero(); m],
        reduced: vec![S::zero(); n_total],
        iterations: 0,
    };
    for j in 0..n_total {
        let (st, val) = match (&lb[j], &ub[j]) {
            (Bnd::Finite(l), _) => (ColState::AtLower, l.clone()),
            (Bnd::NegInf, Bnd::Finite(u)) => (ColState::AtUpper, u.clone()),
            _ => (ColState::Free, S::zero()),
        };
        ws.state.push(st);
        ws.values.push(val);
    }
    for i in 0..m {
        ws.state[n_struct + i] = ColState::Basic;
    }

    // Initial basic values: with the all-slack basis, s = A·x_N − b.
    let mut slack0 = lp.rhs.clone();
    for v in slack0.iter_mut() {
        *v = -v.clone();
    }
    for (j, col) in cols.iter().enumerate().take(n_struct) {
        if ws.values[j] == S::zero() {
            continue;
        }
        for (i, a) in col {
            let delta = a.clone() * ws.values[j].clone();
            slack0[*i] = slack0[*i].clone() + delta;
        }
    }
    ws.values[n_struct..n_total].clone_from_slice(&slack0);

    // Phase 1: artificials for rows whose slack starts below 0.
    let mut art_row: Vec<usize> = Vec::new();
    let mut cost1: Vec<S> = vec![S::zero(); n_total];
    let neg_feastol = -params.feastol.clone();
    for i in 0..m {
        if ws.values[n_struct + i] < neg_feastol {
            let art = cols.len();
            cols.push(vec![(i, S::one())]);
            lb.push(Bnd::Finite(S::zero()));
            ub.push(Bnd::PosInf);
            cost1.push(S::one());
            art_row.push(i);
            ws.values.push(-ws.values[n_struct + i].clone());
            ws.state.push(ColState::Basic);
            ws.state[n_struct + i] = ColState::AtLower;
            ws.values[n_struct + i] = S::zero();
            ws.basis[i] = art;
            ws.reduced.push(S::zero());
        }
    }

    let finish = |ws: Workspace<S>, status: EngineStatus, phase1: Option<S>| {
        let mut objective = S::zero();
        for j in 0..n_total {
            if lp.cost[j] == S::zero() || ws.values[j] == S::zero() {
                continue;
            }
            objective = objective + lp.cost[j].clone() * ws.values[j].clone();
        }
        EngineOutput {
            status,
            objective,
            values: ws.values[..n_total].to_vec(),
            duals: ws.duals,
            reduced: ws.reduced[..n_total].to_vec(),
            state: ws.state[..n_total].to_vec(),
            phase1_objective: phase1,
            iterations: ws.iterations,
        }
    };

    if !art_row.is_empty() {
        let exit = simplex_loop(&cols, &cost1, &lb, &ub, &lp.rhs, params, n_total, &mut ws);
        match exit {
            LoopExit::Optimal => {}
            LoopExit::Unbounded => {
                // Phase-1 objective is bounded below by 0; unreachable.
                debug_assert!(false, "phase-1 LP reported unbounded");
                return finish(ws, EngineStatus::IterationLimit, None);
            }
            LoopExit::IterationLimit | LoopExit::Breakdown => {
                return finish(ws, EngineStatus::IterationLimit, None);
            }
        }
        let mut infeas = S::zero();
        for k in 0..art_row.len() {
            let v = ws.values[n_total + k].clone();
            if v > S::zero() {
                infeas = infeas + v;
            }
        }
        if infeas > params.feastol {
            return finish(ws, EngineStatus::Infeasible, Some(infeas));
        }
        // Feasible: evict any artificial still basic (it sits at ~0) by
        // handing its slot to the row's slack. The two columns are ±e_i, so
        // the basis matrix only flips a column sign and stays nonsingular;
        // the slack takes the negated (still ~0) value.
        for slot in 0..m {
            let j = ws.basis[slot];
            if j >= n_total {
                let row = art_row[j - n_total];
                let slack = n_struct + row;
                debug_assert_eq!(ws.state[slack], ColState::AtLower);
                ws.basis[slot] = slack;
                ws.state[slack] = ColState::Basic;
                ws.values[slack] = -ws.values[j].clone();
            }
        }
        cols.truncate(n_total);
        lb.truncate(n_total);
        ub.truncate(n_total);
        ws.values.truncate(n_total);
        ws.state.truncate(n_total);
        ws.reduced.truncate(n_total);
    }

    // Phase 2 under the real costs.
    let exit = simplex_loop(&cols, &lp.cost, &lb, &ub, &lp.rhs, params, n_total, &mut ws);
    let status = match exit {
        LoopExit::Optimal => EngineStatus::Optimal,
        LoopExit::Unbounded => EngineStatus::Unbounded,
        LoopExit::IterationLimit | LoopExit::Breakdown => EngineStatus::IterationLimit,
    };
    finish(ws, status, None)
}

/// Run one phase to optimality (of the supplied costs), unboundedness, or a
/// resource/numerical stop. Prices only columns below `price_limit`, so
/// evicted artificials never re-enter.
#[allow(clippy::too_many_arguments)]
fn simplex_loop<S: Scalar>(
    cols: &[Vec<(usize, S)>],
    cost: &[S],
    lb: &[Bnd<S>],
    ub: &[Bnd<S>],
    rhs: &[S],
    params: &EngineParams<S>,
    price_limit: usize,
    ws: &mut Workspace<S>,
) -> LoopExit {
    let m = rhs.len();
    let neg_opttol = -params.opttol.clone();
    let bland_threshold = 3 * (cols.len() as u64);
    let mut bland = params.bland_always;
    let mut degenerate_streak: u64 = 0;

    loop {
        // Factorize the current basis and refresh values, duals, reduced
        // costs. Everything downstream reads this snapshot.
        let dense = dense_basis(cols, &ws.basis, m);
        let Some(lu) = DenseLu::factor(dense, m, &params.lu_floor) else {
            return LoopExit::Breakdown;
        };
        let mut rhs_adj: Vec<S> = rhs.to_vec();
        for (j, col) in cols.iter().enumerate() {
            if ws.state[j] == ColState::Basic || ws.values[j] == S::zero() {
                continue;
            }
            for (i, a) in col {
                let delta = a.clone() * ws.values[j].clone();
                rhs_adj[*i] = rhs_adj[*i].clone() - delta;
            }
        }
        let xb = lu.solve(&rhs_adj);
        for (slot, &j) in ws.basis.iter().enumerate() {
            ws.values[j] = xb[slot].clone();
        }
        let cb: Vec<S> = ws.basis.iter().map(|&j| cost[j].clone()).collect();
        ws.duals = lu.solve_transposed(&cb);
        for (j, col) in cols.iter().enumerate() {
            let mut d = cost[j].clone();
            for (i, a) in col {
                if ws.duals[*i] == S::zero() {
                    continue;
                }
                let delta = a.clone() * ws.duals[*i].clone();
                d = d - delta;
            }
            ws.reduced[j] = d;
        }

        // Pricing. Fixed columns (ℓ = u) are skipped: they cannot move and
        // impose no dual-feasibility condition.
        let mut entering: Option<(usize, bool, S)> = None; // (col, increases, |d|)
        for j in 0..price_limit {
            let dir_up = match ws.state[j] {
                ColState::Basic => continue,
                ColState::AtLower => {
                    if lb[j] == ub[j] || !(ws.reduced[j] < neg_opttol) {
                        continue;
                    }
                    true
                }
                ColState::AtUpper => {
                    if lb[j] == ub[j] || !(ws.reduced[j] > params.opttol) {
                        continue;
                    }
                    false
                }
                ColState::Free => {
                    if ws.reduced[j] < neg_opttol {
                        true
                    } else if ws.reduced[j] > params.opttol {
                        false
                    } else {
                        continue;
                    }
                }
            };
            let improvement = ws.reduced[j].abs();
            match &entering {
                None => entering = Some((j, dir_up, improvement)),
                Some((_, _, best)) => {
                    if !bland && improvement > *best {
                        entering = Some((j, dir_up, improvement));
                    }
                }
            }
            if bland {
                break; // smallest eligible index
            }
        }
        let Some((q, dir_up, _)) = entering else {
            return LoopExit::Optimal;
        };

        if ws.iterations >= params.iteration_limit {
            return LoopExit::IterationLimit;
        }
        ws.iterations += 1;

        // Direction column w = B⁻¹·a_q; moving x_q by ±t moves the basic
        // variable in slot k by ∓t·w_k.
        let mut aq = vec![S::zero(); m];
        for (i, a) in &cols[q] {
            aq[*i] = a.clone();
        }
        let w = lu.solve(&aq);

        // Ratio test over the basic columns.
        struct Leaving<S> {
            slot: usize,
            col: usize,
            to_upper: bool,
            wabs: S,
        }
        let mut best_t: Option<S> = None;
        let mut leaving: Option<Leaving<S>> = None;
        for (slot, wk) in w.iter().enumerate() {
            let j = ws.basis[slot];
            let wabs = wk.abs();
            if !(wabs > params.zerotol) {
                continue;
            }
            // g = (dir_up ? +1 : −1)·w_slot; positive g drives x_j down.
            let g_pos = if dir_up {
                *wk > S::zero()
            } else {
                *wk < S::zero()
            };
            let (bound, to_upper) = if g_pos { (&lb[j], false) } else { (&ub[j], true) };
            let Some(bval) = bound.as_finite() else {
                continue;
            };
            let gap = if g_pos {
                ws.values[j].clone() - bval.clone()
            } else {
                bval.clone() - ws.values[j].clone()
            };
            // Floats may sit slightly outside a bound; the step is 0, not
            // negative.
            let gap = if gap < S::zero() { S::zero() } else { gap };
            let t = gap / wabs.clone();
            let better = match (&best_t, &leaving) {
                (None, _) => true,
                (Some(bt), Some(lv)) => {
                    if t < *bt {
                        true
                    } else if t == *bt {
                        if bland {
                            j < lv.col
                        } else {
                            wabs > lv.wabs || (wabs == lv.wabs && j < lv.col)
                        }
                    } else {
                        false
                    }
                }
                _ => unreachable!(),
            };
            if better {
                best_t = Some(t);
                leaving = Some(Leaving {
                    slot,
                    col: j,
                    to_upper,
                    wabs,
                });
            }
        }
        // The entering column's own opposite bound caps the step too (bound
        // flip). Fixed columns never enter, so a flip moves strictly.
        let t_self: Option<S> = match (&lb[q], &ub[q]) {
            (Bnd::Finite(l), Bnd::Finite(u)) => Some(u.clone() - l.clone()),
            _ => None,
        };

        let step;
        match (t_self, leaving, best_t) {
            (None, None, _) => return LoopExit::Unbounded,
            (Some(ts), None, _) => {
                step = ts;
                ws.state[q] = if dir_up {
                    ColState::AtUpper
                } else {
                    ColState::AtLower
                };
                ws.values[q] = match ws.state[q] {
                    ColState::AtUpper => ub[q].as_finite().unwrap().clone(),
                    _ => lb[q].as_finite().unwrap().clone(),
                };
            }
            (ts, Some(lv), Some(bt)) => {
                let flip = matches!(&ts, Some(t) if *t <= bt);
                if flip {
                    step = ts.unwrap();
                    ws.state[q] = if dir_up {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                    ws.values[q] = match ws.state[q] {
                        ColState::AtUpper => ub[q].as_finite().unwrap().clone(),
                        _ => lb[q].as_finite().unwrap().clone(),
                    };
                } else {
                    step = bt;
                    let enter_base = match ws.state[q] {
                        ColState::AtLower => lb[q].as_finite().unwrap().clone(),
                        ColState::AtUpper => ub[q].as_finite().unwrap().clone(),
                        _ => S::zero(),
                    };
                    ws.values[q] = if dir_up {
                        enter_base + step.clone()
                    } else {
                        enter_base - step.clone()
                    };
                    ws.state[q] = ColState::Basic;
                    ws.state[lv.col] = if lv.to_upper {
                        ColState::AtUpper
                    } else {
                        ColState::AtLower
                    };
                    ws.values[lv.col] = if lv.to_upper {
                        ub[lv.col].as_finite().unwrap().clone()
                    } else {
                        lb[lv.col].as_finite().unwrap().clone()
                    };
                    ws.basis[lv.slot] = q;
                }
            }
            (_, Some(_), None) => unreachable!(),
        }

        if step > params.zerotol {
            degenerate_streak = 0;
            bland = params.bland_always;
        } else {
            degenerate_streak += 1;
            if degenerate_streak > bland_threshold {
                bland = true;
            }
        }
    }
}
