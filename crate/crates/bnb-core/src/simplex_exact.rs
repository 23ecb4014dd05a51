//! Round-off-error-free LP machinery over rationals.
//!
//! Three entry points, in increasing cost:
//! * [`factorize_basis_exact`] — re-derive the basic solution of a basis the
//!   floating-point solver reached, by exact LU; decides Optimal or yields a
//!   valid dual bound when the point is only dual feasible;
//! * [`complete_solution`] — fix the integer variables to given values and
//!   minimize exactly over the continuous rest;
//! * [`solve_lp_exact`] — full rational simplex with Bland's rule, the
//!   court of last resort that always decides.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{MipProblem, VarBounds};
use crate::rational::{ExtendedRational, Rational};
use crate::simplex::{self, Bnd, DenseLu, EngineLp, EngineParams, EngineStatus};
use crate::simplex_fp::{Basis, RowStatus, VarStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactLpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an exact LP solve. Every populated field is exact; the
/// strong-duality identity is asserted at construction.
#[derive(Clone, Debug)]
pub struct ExactLpResult {
    pub status: ExactLpStatus,
    /// `cᵀx*` when Optimal, `+∞` when Infeasible, `−∞` when Unbounded.
    pub objective: ExtendedRational,
    pub x: Option<Vec<Rational>>,
    pub y: Option<Vec<Rational>>,
    pub r_pos: Option<Vec<Rational>>,
    pub r_neg: Option<Vec<Rational>>,
    /// Row multipliers certifying infeasibility. Present for every
    /// infeasible LP whose variable box is nonempty.
    pub farkas_ray: Option<Vec<Rational>>,
    /// When the box itself is empty (ℓ_j > u_j), no row certificate exists;
    /// the crossing variable is the certificate instead.
    pub infeasible_var: Option<usize>,
    pub iterations: u64,
}

fn exact_params() -> EngineParams<Rational> {
    EngineParams {
        feastol: Rational::zero(),
        opttol: Rational::zero(),
        zerotol: Rational::zero(),
        lu_floor: Rational::zero(),
        bland_always: true,
        iteration_limit: u64::MAX,
    }
}

fn bnd_of(e: &ExtendedRational) -> Bnd<Rational> {
    match e {
        ExtendedRational::NegInf => Bnd::NegInf,
        ExtendedRational::PosInf => Bnd::PosInf,
        ExtendedRational::Finite(r) => Bnd::Finite(r.clone()),
    }
}

fn build_lp(p: &MipProblem, bounds: &VarBounds) -> EngineLp<Rational> {
    let n = p.num_vars();
    let m = p.num_rows();
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for (i, row) in p.rows.iter().enumerate() {
        for (j, a) in row.iter() {
            cols[j].push((i, a.clone()));
        }
    }
    let mut cost: Vec<Rational> = p.objective.clone();
    let mut lb: Vec<Bnd<Rational>> = bounds.lower.iter().map(bnd_of).collect();
    let mut ub: Vec<Bnd<Rational>> = bounds.upper.iter().map(bnd_of).collect();
    for i in 0..m {
        cols.push(vec![(i, -Rational::one())]);
        cost.push(Rational::zero());
        lb.push(Bnd::Finite(Rational::zero()));
        ub.push(Bnd::PosInf);
    }
    EngineLp {
        n_struct: n,
        cols,
        cost,
        lb,
        ub,
        rhs: p.rhs.clone(),
    }
}

/// Split signed reduced costs into the dual multiplier pair
/// `r⁺ = max(d, 0)`, `r⁻ = max(−d, 0)`.
fn split_reduced(reduced: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let zero = Rational::zero();
    let r_pos = reduced.iter().map(|d| d.clone().max(zero.clone())).collect();
    let r_neg = reduced
        .iter()
        .map(|d| (-d.clone()).max(zero.clone()))
        .collect();
    (r_pos, r_neg)
}

/// Exact dual objective `bᵀy + ℓᵀr⁺ − uᵀr⁻`. Panics if a nonzero multiplier
/// meets an infinite bound — callers only evaluate duals produced by the
/// simplex itself, where that cannot happen.
fn dual_objective(
    p: &MipProblem,
    bounds: &VarBounds,
    y: &[Rational],
    r_pos: &[Rational],
    r_neg: &[Rational],
) -> Rational {
    let mut val = Rational::zero();
    for (b, yi) in p.rhs.iter().zip(y) {
        if !yi.is_zero() {
            val += b * yi;
        }
    }
    for j in 0..p.num_vars() {
        if !r_pos[j].is_zero() {
            let l = bounds.lower[j]
                .as_finite()
                .expect("nonzero lower multiplier on infinite bound");
            val += l * &r_pos[j];
        }
        if !r_neg[j].is_zero() {
            let u = bounds.upper[j]
                .as_finite()
                .expect("nonzero upper multiplier on infinite bound");
            val -= u * &r_neg[j];
        }
    }
    val
}

/// Solve `min cᵀx, Ax ≥ b, ℓ ≤ x ≤ u` exactly. Always decides; Bland's
/// rule guarantees termination.
pub fn solve_lp_exact(p: &MipProblem, local_bounds: &VarBounds) -> ExactLpResult {
    // An empty box has no row certificate; report the crossing directly.
    for j in 0..p.num_vars() {
        if local_bounds.lower[j] > local_bounds.upper[j] {
            return ExactLpResult {
                status: ExactLpStatus::Infeasible,
                objective: ExtendedRational::PosInf,
                x: None,
                y: None,
                r_pos: None,
                r_neg: None,
                farkas_ray: None,
                infeasible_var: Some(j),
                iterations: 0,
            };
        }
    }
    let lp = build_lp(p, local_bounds);
    let out = simplex::solve(&lp, &exact_params());
    let n = p.num_vars();
    match out.status {
        EngineStatus::Optimal => {
            let (r_pos, r_neg) = split_reduced(&out.reduced[..n]);
            let dual = dual_objective(p, local_bounds, &out.duals, &r_pos, &r_neg);
            assert!(
                dual == out.objective,
                "exact strong duality violated: primal {:?} vs dual {:?}",
                out.objective,
                dual
            );
            ExactLpResult {
                status: ExactLpStatus::Optimal,
                objective: ExtendedRational::Finite(out.objective),
                x: Some(out.values[..n].to_vec()),
                y: Some(out.duals),
                r_pos: Some(r_pos),
                r_neg: Some(r_neg),
                farkas_ray: None,
                infeasible_var: None,
                iterations: out.iterations,
            }
        }
        EngineStatus::Infeasible => {
            debug_assert!(out.duals.iter().all(|v| !v.is_negative()));
            ExactLpResult {
                status: ExactLpStatus::Infeasible,
                objective: ExtendedRational::PosInf,
                x: None,
                y: None,
                r_pos: None,
                r_neg: None,
                farkas_ray: Some(out.duals),
                infeasible_var: None,
                iterations: out.iterations,
            }
        }
        EngineStatus::Unbounded => ExactLpResult {
            status: ExactLpStatus::Unbounded,
            objective: ExtendedRational::NegInf,
            x: None,
            y: None,
            r_pos: None,
            r_neg: None,
            farkas_ray: None,
            infeasible_var: None,
            iterations: out.iterations,
        },
        EngineStatus::IterationLimit => {
            unreachable!("exact simplex runs without an iteration limit")
        }
    }
}

/// Result of exactly factorizing a floating-point basis.
#[derive(Clone, Debug)]
pub enum FactorizeOutcome {
    /// The basic pair is exactly primal and dual feasible.
    Optimal(ExactLpResult),
    /// Exactly dual feasible only: `objective` is a valid lower bound.
    DualBound {
        objective: Rational,
        y: Vec<Rational>,
        r_pos: Vec<Rational>,
        r_neg: Vec<Rational>,
    },
    /// Singular, inconsistent, or neither-side-feasible; caller escalates.
    Undecided,
}

/// Re-derive the basic solution of `basis` in exact arithmetic.
pub fn factorize_basis_exact(
    p: &MipProblem,
    local_bounds: &VarBounds,
    basis: &Basis,
) -> FactorizeOutcome {
    let n = p.num_vars();
    let m = p.num_rows();
    if basis.vars.len() != n || basis.rows.len() != m || basis.num_basic() != m {
        return FactorizeOutcome::Undecided;
    }

    // Nonbasic resting values; a status pointing at an infinite bound is an
    // inconsistent basis.
    let mut values: Vec<Rational> = Vec::with_capacity(n + m);
    for j in 0..n {
        let v = match basis.vars[j] {
            VarStatus::Basic => Rational::zero(), // filled from the solve
            VarStatus::AtLower => match local_bounds.lower[j].as_finite() {
                Some(l) => l.clone(),
                None => return FactorizeOutcome::Undecided,
            },
            VarStatus::AtUpper => match local_bounds.upper[j].as_finite() {
                Some(u) => u.clone(),
                None => return FactorizeOutcome::Undecided,
            },
            VarStatus::FreeNonbasic => Rational::zero(),
        };
        values.push(v);
    }
    values.extend((0..m).map(|_| Rational::zero()));

    let lp = build_lp(p, local_bounds);
    let basic_cols: Vec<usize> = (0..n)
        .filter(|&j| basis.vars[j] == VarStatus::Basic)
        .chain((0..m).filter_map(|i| (basis.rows[i] == RowStatus::Basic).then_some(n + i)))
        .collect();

    let dense = simplex::dense_basis(&lp.cols, &basic_cols, m);
    let Some(lu) = DenseLu::factor(dense, m, &Rational::zero()) else {
        return FactorizeOutcome::Undecided;
    };
    let mut rhs_adj = lp.rhs.clone();
    for (j, col) in lp.cols.iter().enumerate().take(n) {
        if basis.vars[j] == VarStatus::Basic || values[j].is_zero() {
            continue;
        }
        for (i, a) in col {
            rhs_adj[*i] -= a * &values[j];
        }
    }
    // Nonbasic slacks rest at 0 and contribute nothing.
    let xb = lu.solve(&rhs_adj);
    for (slot, &jcol) in basic_cols.iter().enumerate() {
        values[jcol] = xb[slot].clone();
    }
    let cb: Vec<Rational> = basic_cols.iter().map(|&j| lp.cost[j].clone()).collect();
    let y = lu.solve_transposed(&cb);
    let mut reduced: Vec<Rational> = Vec::with_capacity(n);
    for (j, col) in lp.cols.iter().enumerate().take(n) {
        let mut d = lp.cost[j].clone();
        for (i, a) in col {
            if !y[*i].is_zero() {
                d -= a * &y[*i];
            }
        }
        reduced.push(d);
    }

    // Exact dual feasibility: nonbasic structurals need the right reduced-
    // cost sign (fixed columns are exempt), nonbasic slacks need y_i ≥ 0.
    let mut dual_ok = true;
    for (j, d) in reduced.iter().enumerate() {
        let fixed = local_bounds.lower[j] == local_bounds.upper[j];
        match basis.vars[j] {
            VarStatus::AtLower if !fixed && d.is_negative() => dual_ok = false,
            VarStatus::AtUpper if !fixed && d.is_positive() => dual_ok = false,
            VarStatus::FreeNonbasic if !d.is_zero() => dual_ok = false,
            _ => {}
        }
        if !dual_ok {
            break;
        }
    }
    if dual_ok {
        for (yi, st) in y.iter().zip(&basis.rows) {
            if *st == RowStatus::AtLower && yi.is_negative() {
                dual_ok = false;
                break;
            }
        }
    }
    if !dual_ok {
        return FactorizeOutcome::Undecided;
    }

    let (r_pos, r_neg) = split_reduced(&reduced);
    let dual_obj = dual_objective(p, local_bounds, &y, &r_pos, &r_neg);

    // Exact primal feasibility of the basic values (nonbasic values are at
    // their bounds by construction; row equalities hold by the solve).
    let mut primal_ok = true;
    for &jcol in &basic_cols {
        let (lo, hi) = if jcol < n {
            (bnd_of(&local_bounds.lower[jcol]), bnd_of(&local_bounds.upper[jcol]))
        } else {
            (Bnd::Finite(Rational::zero()), Bnd::PosInf)
        };
        if let Bnd::Finite(l) = &lo {
            if values[jcol] < *l {
                primal_ok = false;
                break;
            }
        }
        if let Bnd::Finite(u) = &hi {
            if values[jcol] > *u {
                primal_ok = false;
                break;
            }
        }
    }

    if primal_ok {
        let mut objective = Rational::zero();
        for (c, v) in p.objective.iter().zip(&values) {
            if !c.is_zero() && !v.is_zero() {
                objective += c * v;
            }
        }
        assert!(
            objective == dual_obj,
            "exact strong duality violated in factorization"
        );
        FactorizeOutcome::Optimal(ExactLpResult {
            status: ExactLpStatus::Optimal,
            objective: ExtendedRational::Finite(objective),
            x: Some(values[..n].to_vec()),
            y: Some(y),
            r_pos: Some(r_pos),
            r_neg: Some(r_neg),
            farkas_ray: None,
            infeasible_var: None,
            iterations: 0,
        })
    } else {
        FactorizeOutcome::DualBound {
            objective: dual_obj,
            y,
            r_pos,
            r_neg,
        }
    }
}

/// Result of exactly completing a rounded integer assignment.
#[derive(Clone, Debug)]
pub enum CompletionOutcome {
    /// Exactly feasible full solution with the integers fixed.
    Completed { x: Vec<Rational>, objective: Rational },
    /// No continuous completion exists; the ray certifies it against the
    /// bounds with the fixings substituted in.
    Impossible { farkas_ray: Vec<Rational> },
    /// The fixed fiber is unbounded below (the MIP itself is unbounded).
    Unbounded,
}

/// Fix the integer variables of `p` to `assignment` (one value per integer
/// variable, in ascending variable order), clamp each value into its bounds,
/// and minimize exactly over the continuous variables.
pub fn complete_solution(
    p: &MipProblem,
    bounds: &VarBounds,
    assignment: &[Rational],
) -> CompletionOutcome {
    let mut fixed = bounds.clone();
    let mut k = 0usize;
    for j in p.integer_indices() {
        let mut v = assignment[k].clone();
        k += 1;
        if let Some(l) = bounds.lower[j].as_finite() {
            if v < *l {
                v = l.clone();
            }
        }
        if let Some(u) = bounds.upper[j].as_finite() {
            if v > *u {
                v = u.clone();
            }
        }
        fixed.lower[j] = ExtendedRational::Finite(v.clone());
        fixed.upper[j] = ExtendedRational::Finite(v);
    }
    debug_assert_eq!(k, assignment.len());

    let res = solve_lp_exact(p, &fixed);
    match res.status {
        ExactLpStatus::Optimal => {
            let ExtendedRational::Finite(objective) = res.objective else {
                unreachable!()
            };
            CompletionOutcome::Completed {
                x: res.x.expect("optimal result carries a solution"),
                objective,
            }
        }
        ExactLpStatus::Infeasible => CompletionOutcome::Impossible {
            farkas_ray: res
                .farkas_ray
                .expect("clamped fixing keeps the box consistent"),
        },
        ExactLpStatus::Unbounded => CompletionOutcome::Unbounded,
    }
}
