//! Floating-point LP solver: the engine under audit.
//!
//! `solve_lp_fp` runs the bounded-variable two-phase simplex in `f64` with
//! the usual solver tolerances. Its decisions (optimal bases, dual vectors,
//! Farkas rays) are exactly what the verifier later re-examines in rational
//! arithmetic; nothing here is trusted downstream.

use alloc::vec::Vec;

use crate::model::{MipProblem, VarBounds};
use crate::rational::ExtendedRational;
use crate::simplex::{self, Bnd, ColState, EngineLp, EngineParams, EngineStatus};

/// Nonbasic/basic status of a structural variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    FreeNonbasic,
}

/// Status of a row's logical (slack) variable. A slack has bounds `[0, ∞)`,
/// so it can only rest at its lower bound when nonbasic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    Basic,
    AtLower,
}

/// A simplex basis: exactly `m` entries are `Basic` across both vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub vars: Vec<VarStatus>,
    pub rows: Vec<RowStatus>,
}

impl Basis {
    pub fn num_basic(&self) -> usize {
        self.vars.iter().filter(|s| **s == VarStatus::Basic).count()
            + self.rows.iter().filter(|s| **s == RowStatus::Basic).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpLpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Outcome of a floating-point LP solve.
#[derive(Clone, Debug)]
pub struct FpLpResult {
    pub status: FpLpStatus,
    /// `cᵀx̂` (no objective offset).
    pub objective: f64,
    /// Structural primal values.
    pub x: Vec<f64>,
    /// Row duals.
    pub y: Vec<f64>,
    /// Split reduced costs: `r⁺ = max(d, 0)`, `r⁻ = max(−d, 0)`.
    pub r_pos: Vec<f64>,
    pub r_neg: Vec<f64>,
    /// Final basis; absent when the LP is infeasible (an infeasible node
    /// has no usable basis for exact factorization).
    pub basis: Option<Basis>,
    /// Phase-1 duals certifying infeasibility; present iff `Infeasible`.
    pub farkas_ray: Option<Vec<f64>>,
    pub iterations: u64,
}

/// Solver tolerances, spelled as the usual solver parameter names.
#[derive(Clone, Copy, Debug)]
pub struct FpTolerances {
    /// Maximum primal violation accepted as feasible.
    pub feastol: f64,
    /// Dual feasibility / pricing threshold.
    pub opttol: f64,
    /// Ratio-test and equality tolerance.
    pub zerotol: f64,
}

impl Default for FpTolerances {
    fn default() -> Self {
        FpTolerances {
            feastol: 1e-6,
            opttol: 1e-7,
            zerotol: 1e-9,
        }
    }
}

fn bnd_of(e: &ExtendedRational) -> Bnd<f64> {
    match e {
        ExtendedRational::NegInf => Bnd::NegInf,
        ExtendedRational::PosInf => Bnd::PosInf,
        ExtendedRational::Finite(r) => {
            let v = r.to_f64();
            // A rational too large for f64 is an infinity for this solver.
            if v == f64::INFINITY {
                Bnd::PosInf
            } else if v == f64::NEG_INFINITY {
                Bnd::NegInf
            } else {
                Bnd::Finite(v)
            }
        }
    }
}

/// Solve the LP relaxation `min cᵀx, Ax ≥ b, ℓ ≤ x ≤ u` in floating point,
/// with `local_bounds` replacing the model's global bounds.
pub fn solve_lp_fp(
    p: &MipProblem,
    local_bounds: &VarBounds,
    tol: &FpTolerances,
    iteration_limit: u64,
) -> FpLpResult {
    let n = p.num_vars();
    let m = p.num_rows();
    debug_assert!(local_bounds.is_consistent());

    let mut cols: Vec<Vec<(usize, f64)>> = alloc::vec![Vec::new(); n];
    for (i, row) in p.rows.iter().enumerate() {
        for (j, a) in row.iter() {
            cols[j].push((i, a.to_f64()));
        }
    }
    let mut cost: Vec<f64> = p.objective.iter().map(|c| c.to_f64()).collect();
    let mut lb: Vec<Bnd<f64>> = local_bounds.lower.iter().map(bnd_of).collect();
    let mut ub: Vec<Bnd<f64>> = local_bounds.upper.iter().map(bnd_of).collect();
    for i in 0..m {
        cols.push(alloc::vec![(i, -1.0)]);
        cost.push(0.0);
        lb.push(Bnd::Finite(0.0));
        ub.push(Bnd::PosInf);
    }
    let lp = EngineLp {
        n_struct: n,
        cols,
        cost,
        lb,
        ub,
        rhs: p.rhs.iter().map(|b| b.to_f64()).collect(),
    };
    let params = EngineParams {
        feastol: tol.feastol,
        opttol: tol.opttol,
        zerotol: tol.zerotol,
        lu_floor: 1e-11,
        bland_always: false,
        iteration_limit,
    };
    let out = simplex::solve(&lp, &params);

    let status = match out.status {
        EngineStatus::Optimal => FpLpStatus::Optimal,
        EngineStatus::Infeasible => FpLpStatus::Infeasible,
        EngineStatus::Unbounded => FpLpStatus::Unbounded,
        EngineStatus::IterationLimit => FpLpStatus::IterationLimit,
    };
    let r_pos: Vec<f64> = out.reduced[..n].iter().map(|d| d.max(0.0)).collect();
    let r_neg: Vec<f64> = out.reduced[..n].iter().map(|d| (-d).max(0.0)).collect();
    let basis = if status == FpLpStatus::Infeasible {
        None
    } else {
        let vars = out.state[..n]
            .iter()
            .map(|s| match s {
                ColState::Basic => VarStatus::Basic,
                ColState::AtLower => VarStatus::AtLower,
                ColState::AtUpper => VarStatus::AtUpper,
                ColState::Free => VarStatus::FreeNonbasic,
            })
            .collect();
        let rows = out.state[n..]
            .iter()
            .map(|s| match s {
                ColState::Basic => RowStatus::Basic,
                ColState::AtLower => RowStatus::AtLower,
                _ => {
                    debug_assert!(false, "slack cannot rest at an infinite bound");
                    RowStatus::AtLower
                }
            })
            .collect();
        Some(Basis { vars, rows })
    };
    let farkas_ray = if status == FpLpStatus::Infeasible {
        Some(out.duals.clone())
    } else {
        None
    };
    FpLpResult {
        status,
        objective: match status {
            FpLpStatus::Unbounded => f64::NEG_INFINITY,
            _ => out.objective,
        },
        x: out.values[..n].to_vec(),
        y: out.duals,
        r_pos,
        r_neg,
        basis,
        farkas_ray,
        iterations: out.iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseRow;
    use crate::rational::Rational;
    use alloc::borrow::ToOwned;
    
    use alloc::vec;
    use alloc::vec::Vec;

    fn model(
        n: usize,
        cost: Vec<i64>,
        rows: Vec<(Vec<(usize, i64)>, i64)>,
        bounds: Vec<(i64, i64)>,
    ) -> MipProblem {
        MipProblem {
            name: "t".to_owned(),
            objective: cost.into_iter().map(Rational::from_int).collect(),
            objective_offset: Rational::zero(),
            maximize: false,
            rows: rows
                .iter()
                .map(|(entries, _)| {
                    SparseRow::new(
                        entries
                            .iter()
                            .map(|(j, a)| (*j, Rational::from_int(*a)))
                            .collect(),
                    )
                })
                .collect(),
            rhs: rows.iter().map(|(_, b)| Rational::from_int(*b)).collect(),
            lower: bounds
                .iter()
                .map(|(l, _)| ExtendedRational::from_int(*l))
                .collect(),
            upper: bounds
                .iter()
                .map(|(_, u)| ExtendedRational::from_int(*u))
                .collect(),
            integer: vec![false; n],
            var_names: (0..n).map(|j| alloc::format!("x{j}")).collect(),
            row_names: (0..rows.len()).map(|i| alloc::format!("r{i}")).collect(),
        }
    }

    #[test]
    fn empty_problem_is_trivially_optimal() {
        let p = model(1, vec![0], vec![], vec![(0, 1)]);
        let out = solve_lp_fp(&p, &VarBounds::of_model(&p), &FpTolerances::default(), 100);
        assert_eq!(out.status, FpLpStatus::Optimal);
        assert_eq!(out.objective, 0.0);
    }

    #[test]
    fn single_variable_at_upper_reports_reduced_cost() {
        // min −x, x ∈ [0,1]: x̂ = 1, d = −1 so r⁻ = 1.
        let p = model(1, vec![-1], vec![], vec![(0, 1)]);
        let out = solve_lp_fp(&p, &VarBounds::of_model(&p), &FpTolerances::default(), 100);
        assert_eq!(out.status, FpLpStatus::Optimal);
        assert_eq!(out.objective, -1.0);
        assert_eq!(out.x, vec![1.0]);
        assert_eq!(out.r_neg, vec![1.0]);
        assert_eq!(out.r_pos, vec![0.0]);
        let basis = out.basis.unwrap();
        assert_eq!(basis.vars, vec![VarStatus::AtUpper]);
        assert_eq!(basis.num_basic(), 0);
    }

    #[test]
    fn conflicting_rows_give_unit_farkas_ray() {
        // x ≥ 1 and −x ≥ 0 over [0,1]: infeasible, ray (1,1).
        let p = model(
            1,
            vec![0],
            vec![(vec![(0, 1)], 1), (vec![(0, -1)], 0)],
            vec![(0, 1)],
        );
        let out = solve_lp_fp(&p, &VarBounds::of_model(&p), &FpTolerances::default(), 100);
        assert_eq!(out.status, FpLpStatus::Infeasible);
        assert!(out.basis.is_none());
        let ray = out.farkas_ray.unwrap();
        assert_eq!(ray, vec![1.0, 1.0]);
        // yᵀb = 1 exceeds the box-max of (Aᵀy)ᵀx = 0·x.
        assert!(ray[0] * 1.0 + ray[1] * 0.0 > 0.0);
    }

    #[test]
    fn identical_inputs_reproduce_identical_results() {
        let p = model(
            3,
            vec![-2, -3, 1],
            vec![
                (vec![(0, 1), (1, 2), (2, -1)], -4),
                (vec![(0, -3), (1, 1)], -6),
                (vec![(1, -1), (2, -2)], -5),
            ],
            vec![(0, 7), (0, 7), (-2, 7)],
        );
        let a = solve_lp_fp(&p, &VarBounds::of_model(&p), &FpTolerances::default(), 1000);
        let b = solve_lp_fp(&p, &VarBounds::of_model(&p), &FpTolerances::default(), 1000);
        assert_eq!(a.status, b.status);
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        let bits = |v: &Vec<f64>| v.iter().map(|f| f.to_bits()).collect::<Vec<u64>>();
        assert_eq!(bits(&a.x), bits(&b.x));
        assert_eq!(bits(&a.y), bits(&b.y));
        assert_eq!(a.basis, b.basis);
    }

    #[test]
    fn local_bounds_override_model_bounds() {
        let p = model(1, vec![-1], vec![], vec![(0, 5)]);
        let mut bounds = VarBounds::of_model(&p);
        bounds.upper[0] = ExtendedRational::from_int(2);
        let out = solve_lp_fp(&p, &bounds, &FpTolerances::default(), 100);
        assert_eq!(out.status, FpLpStatus::Optimal);
        assert_eq!(out.objective, -2.0);
    }
}
