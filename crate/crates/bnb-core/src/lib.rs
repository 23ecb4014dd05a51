//! Audit core for LP-based branch-and-bound over mixed-integer programs.
//!
//! The crate is split along the audit pipeline:
//!
//! * [`rational`] — exact rational arithmetic, binary64 conversions and
//!   continued-fraction reconstruction of floating-point values,
//! * [`model`] — the MIP representation (`min cᵀx, Ax ≥ b, ℓ ≤ x ≤ u`,
//!   integrality on a subset) plus exact presolve and deterministic
//!   permutation,
//! * [`simplex_fp`] — the floating-point bounded-variable simplex whose
//!   decisions are the object under audit,
//! * [`simplex_exact`] — the exact rational simplex, exact basis
//!   refactorization and exact solution completion used as ground truth,
//! * [`bnb`] — the event-logged branch-and-bound driver,
//! * [`verify`] — the a-posteriori leaf verifier: an escalating cascade of
//!   safe dual bounding, rational reconstruction, exact factorization and
//!   exact LP solves that classifies every leaf decision and derives a safe
//!   global dual bound.
//!
//! The crate is `no_std` (with `alloc`); everything involving files, clocks
//! and serialization lives in the companion crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bnb;
pub mod model;
pub mod rational;
mod simplex;
pub mod simplex_exact;
pub mod simplex_fp;
pub mod verify;
