//! Turns low-level skill-execution data into propositional STRIPS planning domains.
//!
//! The pipeline runs in stages:
//!
//! 1. [`env`] defines bulb-switch scenarios as guarded assignment options over
//!    binary state variables, plus a deterministic simulator for them.
//! 2. [`explorer`] runs a seeded random exploration of a scenario and splits the
//!    resulting transition log into per-option training sets.
//! 3. [`setrep`] provides the two projectable set representations that are being
//!    compared: decision-tree boxes (`c45`) and interval hulls (`intm`).
//! 4. [`abstraction`] groups variables into factors, generates propositional
//!    symbols by projection, and assembles operators with preconditions and
//!    positive/negative effects.
//! 5. [`pddl`] emits the symbolic domain as canonical STRIPS text, parses it
//!    back, and plans over it with breadth-first search.
//! 6. [`pipeline`] wires the stages together behind one configuration type and
//!    is what the `symgen` binary calls into.

pub mod abstraction;
pub mod env;
pub mod explorer;
pub mod pddl;
pub mod pipeline;
pub mod setrep;

use thiserror::Error;

/// Crate-wide error type. Variants distinguish rejected inputs (bad arguments,
/// malformed files) from internal consistency violations so the CLI can map
/// them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("scenario file: {0}")]
    ScenarioFile(String),
    #[error("strict mode: decision tree has {0} true leaves, expected exactly 1")]
    MultipleTrueLeaves(usize),
    #[error("inconsistent data: {0}")]
    Inconsistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
