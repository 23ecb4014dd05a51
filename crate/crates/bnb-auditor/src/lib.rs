//! Std companion of `bnb-core`: everything that touches files, clocks and
//! serialization.
//!
//! * [`mps`] — MPS reader producing exact-rational models in the core's
//!   normalized `min cᵀx, Ax ≥ b` form,
//! * [`canonical`] — the canonical exact text serialization of a model and
//!   its SHA-256 content hash, used to bind event logs to instances,
//! * [`eventlog`] — the JSON-lines audit log: header (hash, tolerances),
//!   one line per search event, and the solver's claimed outcome; every
//!   binary64 is stored with its exact bit pattern,
//! * [`report`] — text and JSON renderings of a verification report,
//! * [`pipeline`] — the `solve` / `verify` / `run` orchestration behind the
//!   command-line interface, including the worker-pool verifier.

pub mod canonical;
pub mod eventlog;
pub mod mps;
pub mod pipeline;
pub mod report;
