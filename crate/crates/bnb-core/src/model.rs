//! The MIP representation and exact model transformations.
//!
//! A [`MipProblem`] is always in the normalized form
//!
//! ```text
//! min cᵀx   s.t.   Ax ≥ b,   ℓ ≤ x ≤ u,   x_j ∈ ℤ for j ∈ I
//! ```
//!
//! with all data rational. Parsers are responsible for converting `≤`/`=`
//! rows and maximization into this form. The transformations here —
//! redundant-row cleanup, singleton conversion, activity-based bound
//! propagation, and seeded permutation — are exact: they never change the
//! set of feasible solutions or the optimal value, except that presolve may
//! prove infeasibility outright (reported via a flag, never by panicking).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::{ExtendedRational, Rational};

/// One row of the constraint matrix: column-sorted, nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRow {
    pub entries: Vec<(usize, Rational)>,
}

impl SparseRow {
    pub fn new(mut entries: Vec<(usize, Rational)>) -> Self {
        entries.sort_by_key(|(j, _)| *j);
        entries.retain(|(_, a)| !a.is_zero());
        SparseRow { entries }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(j, a)| (*j, a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact dot product with a dense vector.
    pub fn dot(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (j, a) in self.iter() {
            acc += a * &x[j];
        }
        acc
    }
}

/// Node-local (or global) variable bounds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarBounds {
    pub lower: Vec<ExtendedRational>,
    pub upper: Vec<ExtendedRational>,
}

impl VarBounds {
    pub fn of_model(p: &MipProblem) -> Self {
        VarBounds {
            lower: p.lower.clone(),
            upper: p.upper.clone(),
        }
    }

    /// True iff ℓ_j ≤ u_j for every variable.
    pub fn is_consistent(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u)
    }
}

/// A mixed-integer program in normalized `min, ≥` form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MipProblem {
    pub name: String,
    /// Objective coefficients, length `num_vars`.
    pub objective: Vec<Rational>,
    /// Constant objective offset (from RHS entries on the objective row).
    pub objective_offset: Rational,
    /// True when the original problem was a maximization; `objective` is
    /// already negated, reported values should be negated back.
    pub maximize: bool,
    pub rows: Vec<SparseRow>,
    pub rhs: Vec<Rational>,
    pub lower: Vec<ExtendedRational>,
    pub upper: Vec<ExtendedRational>,
    /// `integer[j]` marks x_j as integral.
    pub integer: Vec<bool>,
    pub var_names: Vec<String>,
    pub row_names: Vec<String>,
}

impl MipProblem {
    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn integer_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.integer
            .iter()
            .enumerate()
            .filter_map(|(j, is_int)| is_int.then_some(j))
    }

    /// Structural consistency checks; parsers and transformations must
    /// produce models that pass.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.num_vars();
        let m = self.num_rows();
        if self.lower.len() != n
            || self.upper.len() != n
            || self.integer.len() != n
            || self.var_names.len() != n
        {
            return Err(ModelError::LengthMismatch);
        }
        if self.rhs.len() != m || self.row_names.len() != m {
            return Err(ModelError::LengthMismatch);
        }
        for (i, row) in self.rows.iter().enumerate() {
            let mut last: Option<usize> = None;
            for (j, a) in row.iter() {
                if j >= n {
                    return Err(ModelError::BadColumnIndex { row: i, col: j });
                }
                if a.is_zero() {
                    return Err(ModelError::ZeroCoefficient { row: i, col: j });
                }
                if let Some(prev) = last {
                    if j <= prev {
                        return Err(ModelError::UnsortedRow { row: i });
                    }
                }
                last = Some(j);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    LengthMismatch,
    BadColumnIndex { row: usize, col: usize },
    ZeroCoefficient { row: usize, col: usize },
    UnsortedRow { row: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::LengthMismatch => write!(f, "model vector lengths disagree"),
            ModelError::BadColumnIndex { row, col } => {
                write!(f, "row {row} references column {col} out of range")
            }
            ModelError::ZeroCoefficient { row, col } => {
                write!(f, "row {row} stores a zero coefficient for column {col}")
            }
            ModelError::UnsortedRow { row } => {
                write!(f, "row {row} has unsorted or duplicate column indices")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

/// Exact lower bound of a row activity `aᵀx` over the box, split into its
/// finite part and the number of infinite contributions.
struct ActivityBound {
    finite: Rational,
    inf_count: usize,
}

fn activity_min(row: &SparseRow, bounds: &VarBounds) -> ActivityBound {
    let mut finite = Rational::zero();
    let mut inf_count = 0usize;
    for (j, a) in row.iter() {
        let contrib = if a.is_positive() {
            &bounds.lower[j]
        } else {
            &bounds.upper[j]
        };
        match contrib.as_finite() {
            Some(v) => finite += a * v,
            None => inf_count += 1,
        }
    }
    ActivityBound { finite, inf_count }
}

/// Exact upper bound of a row activity, same representation. Infinite
/// contributions all push toward `+∞` here.
fn activity_max(row: &SparseRow, bounds: &VarBounds) -> ActivityBound {
    let mut finite = Rational::zero();
    let mut inf_count = 0usize;
    for (j, a) in row.iter() {
        let contrib = if a.is_positive() {
            &bounds.upper[j]
        } else {
            &bounds.lower[j]
        };
        match contrib.as_finite() {
            Some(v) => finite += a * v,
            None => inf_count += 1,
        }
    }
    ActivityBound { finite, inf_count }
}

/// Result of a presolve stage: the transformed model plus flags. An
/// `infeasible` outcome is a legitimate answer, not an error.
#[derive(Clone, Debug)]
pub struct PresolveOutcome {
    pub model: MipProblem,
    pub infeasible: bool,
    /// Rows deleted because their minimum activity already meets the rhs.
    pub deleted_redundant: usize,
    /// Singleton rows converted into variable bounds (and deleted).
    pub converted_singletons: usize,
    /// Bound tightenings applied by propagation.
    pub tightenings: usize,
    /// Propagation sweeps actually performed.
    pub rounds: u32,
}

/// Model cleanup: round integer-variable bounds inward to integers, delete
/// rows that are redundant against the bound box, convert singleton rows
/// into bounds. All arithmetic exact. Detected bound crossings set
/// `infeasible`.
pub fn cleanup_model(p: &MipProblem) -> PresolveOutcome {
    let mut model = p.clone();
    let mut infeasible = false;
    let mut deleted_redundant = 0usize;
    let mut converted_singletons = 0usize;

    // Integral bounds for integral variables.
    for j in 0..model.num_vars() {
        if !model.integer[j] {
            continue;
        }
        if let ExtendedRational::Finite(l) = &model.lower[j] {
            if !l.is_integer() {
                model.lower[j] = ExtendedRational::Finite(l.ceil());
            }
        }
        if let ExtendedRational::Finite(u) = &model.upper[j] {
            if !u.is_integer() {
                model.upper[j] = ExtendedRational::Finite(u.floor());
            }
        }
    }

    let bounds = VarBounds::of_model(&model);
    let mut keep = vec![true; model.num_rows()];
    for (i, row) in model.rows.iter().enumerate() {
        if row.is_empty() {
            // 0 ≥ b_i: trivially true or trivially infeasible.
            if model.rhs[i].is_positive() {
                infeasible = true;
            }
            keep[i] = false;
            deleted_redundant += 1;
            continue;
        }
        let min_act = activity_min(row, &bounds);
        if min_act.inf_count == 0 && min_act.finite >= model.rhs[i] {
            keep[i] = false;
            deleted_redundant += 1;
            continue;
        }
        if row.len() == 1 {
            let (j, a) = (row.entries[0].0, &row.entries[0].1);
            let bound = &model.rhs[i] / a;
            if a.is_positive() {
                let mut new_lower = bound;
                if model.integer[j] {
                    new_lower = new_lower.ceil();
                }
                let new_lower = ExtendedRational::Finite(new_lower);
                if new_lower > model.lower[j] {
                    model.lower[j] = new_lower;
                }
            } else {
                let mut new_upper = bound;
                if model.integer[j] {
                    new_upper = new_upper.floor();
                }
                let new_upper = ExtendedRational::Finite(new_upper);
                if new_upper < model.upper[j] {
                    model.upper[j] = new_upper;
                }
            }
            if model.lower[j] > model.upper[j] {
                infeasible = true;
            }
            keep[i] = false;
            converted_singletons += 1;
        }
    }

    retain_rows(&mut model, &keep);
    PresolveOutcome {
        model,
        infeasible,
        deleted_redundant,
        converted_singletons,
        tightenings: 0,
        rounds: 0,
    }
}

/// Activity-based bound propagation in exact arithmetic: for each row
/// `aᵀx ≥ b` and variable `j` in it, the residual maximum activity of the
/// other terms implies a bound on `x_j`. Sweeps until fixpoint or
/// `max_rounds`. Integer bounds are rounded inward.
pub fn propagate_bounds(p: &MipProblem, max_rounds: u32) -> PresolveOutcome {
    let mut model = p.clone();
    let mut infeasible = false;
    let mut tightenings = 0usize;
    let mut rounds = 0u32;

    'sweeps: while rounds < max_rounds {
        rounds += 1;
        let mut changed = false;
        for i in 0..model.num_rows() {
            let bounds = VarBounds::of_model(&model);
            let row = &model.rows[i];
            let max_act = activity_max(row, &bounds);
            if max_act.inf_count > 1 {
                continue;
            }
            let row_entries: Vec<(usize, Rational)> = row.entries.clone();
            for (j, a) in &row_entries {
                let j = *j;
                // Residual max activity of the other terms.
                let own_contrib = if a.is_positive() {
                    &model.upper[j]
                } else {
                    &model.lower[j]
                };
                let residual = match (max_act.inf_count, own_contrib.as_finite()) {
                    (0, Some(v)) => &max_act.finite - &(a * v),
                    (1, None) => max_act.finite.clone(),
                    // The sole infinite contribution comes from another
                    // variable: no finite residual for this one.
                    (1, Some(_)) => continue,
                    _ => unreachable!(),
                };
                // a_j · x_j ≥ b_i − residual.
                let implied = (&model.rhs[i] - &residual) / a;
                if a.is_positive() {
                    let mut new_lower = implied;
                    if model.integer[j] {
                        new_lower = new_lower.ceil();
                    }
                    let new_lower = ExtendedRational::Finite(new_lower);
                    if new_lower > model.lower[j] {
                        model.lower[j] = new_lower;
                        tightenings += 1;
                        changed = true;
                    }
                } else {
                    let mut new_upper = implied;
                    if model.integer[j] {
                        new_upper = new_upper.floor();
                    }
                    let new_upper = ExtendedRational::Finite(new_upper);
                    if new_upper < model.upper[j] {
                        model.upper[j] = new_upper;
                        tightenings += 1;
                        changed = true;
                    }
                }
                if model.lower[j] > model.upper[j] {
                    infeasible = true;
                    break 'sweeps;
                }
            }
        }
        if !changed {
            break;
        }
    }

    PresolveOutcome {
        model,
        infeasible,
        deleted_redundant: 0,
        converted_singletons: 0,
        tightenings,
        rounds,
    }
}

/// Full presolve: cleanup followed by propagation, with merged statistics.
pub fn presolve(p: &MipProblem, max_rounds: u32) -> PresolveOutcome {
    let cleaned = cleanup_model(p);
    if cleaned.infeasible {
        return cleaned;
    }
    let propagated = propagate_bounds(&cleaned.model, max_rounds);
    PresolveOutcome {
        model: propagated.model,
        infeasible: propagated.infeasible,
        deleted_redundant: cleaned.deleted_redundant,
        converted_singletons: cleaned.converted_singletons,
        tightenings: propagated.tightenings,
        rounds: propagated.rounds,
    }
}

fn retain_rows(model: &mut MipProblem, keep: &[bool]) {
    let mut idx = 0usize;
    model.rows.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
    idx = 0;
    model.rhs.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
    idx = 0;
    model.row_names.retain(|_| {
        let k = keep[idx];
        idx += 1;
        k
    });
}

/// splitmix64 with the reference constants; drives all seeded shuffles.
#[derive(Clone, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// A permuted model together with its index maps.
#[derive(Clone, Debug)]
pub struct PermutedModel {
    pub model: MipProblem,
    /// `row_of_new[i]` is the original index of permuted row `i`.
    pub row_of_new: Vec<usize>,
    /// `var_of_new[j]` is the original index of permuted variable `j`.
    pub var_of_new: Vec<usize>,
}

impl PermutedModel {
    /// The identity "permutation" used when shuffling is disabled.
    pub fn identity(model: MipProblem) -> Self {
        let row_of_new = (0..model.num_rows()).collect();
        let var_of_new = (0..model.num_vars()).collect();
        PermutedModel {
            model,
            row_of_new,
            var_of_new,
        }
    }
}

/// Fisher–Yates shuffle driven by splitmix64 (index drawn as
/// `next_u64() mod (i+1)`; the slight modulo bias is irrelevant for a
/// deterministic reordering). Rows are shuffled first, then columns, from
/// the same stream.
pub fn permute_model(p: &MipProblem, seed: u64) -> PermutedModel {
    let mut rng = SplitMix64(seed);
    let row_of_new = shuffled_identity(p.num_rows(), &mut rng);
    let var_of_new = shuffled_identity(p.num_vars(), &mut rng);

    let mut new_of_old_var = vec![0usize; p.num_vars()];
    for (new, &old) in var_of_new.iter().enumerate() {
        new_of_old_var[old] = new;
    }

    let model = MipProblem {
        name: p.name.clone(),
        objective: var_of_new.iter().map(|&j| p.objective[j].clone()).collect(),
        objective_offset: p.objective_offset.clone(),
        maximize: p.maximize,
        rows: row_of_new
            .iter()
            .map(|&i| {
                SparseRow::new(
                    p.rows[i]
                        .iter()
                        .map(|(j, a)| (new_of_old_var[j], a.clone()))
                        .collect(),
                )
            })
            .collect(),
        rhs: row_of_new.iter().map(|&i| p.rhs[i].clone()).collect(),
        lower: var_of_new.iter().map(|&j| p.lower[j].clone()).collect(),
        upper: var_of_new.iter().map(|&j| p.upper[j].clone()).collect(),
        integer: var_of_new.iter().map(|&j| p.integer[j]).collect(),
        var_names: var_of_new.iter().map(|&j| p.var_names[j].clone()).collect(),
        row_names: row_of_new.iter().map(|&i| p.row_names[i].clone()).collect(),
    };

    PermutedModel {
        model,
        row_of_new,
        var_of_new,
    }
}

fn shuffled_identity(len: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        perm.swap(i, j);
    }
    perm
}
