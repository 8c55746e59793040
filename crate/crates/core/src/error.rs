//! Error type shared across the crate.
//!
//! Law *failures* on user-supplied data (a hom matrix that is not transitive,
//! a matrix that is not a bimodule, ...) are reported as structured errors with
//! the first violating witness, in a fixed deterministic scan order.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} is not an element of {kind}")]
    NotInCarrier { kind: String, value: String },

    #[error("mixed quantales: expected {expected}, found {found}")]
    QuantaleMismatch { expected: String, found: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid quantale description: {0}")]
    InvalidDesc(String),

    #[error("unknown point {0:?}")]
    UnknownPoint(String),

    #[error("reflexivity fails at {point}: the unit is not below hom({point},{point})")]
    Reflexivity { point: String },

    #[error("transitivity fails at ({x},{y},{z}): hom({x},{y})*hom({y},{z}) is not below hom({x},{z})")]
    Transitivity { x: String, y: String, z: String },

    #[error("{side} action law fails at ({x},{y},{z})")]
    Bimodule { side: &'static str, x: String, y: String, z: String },

    #[error("presheaf law fails at ({x},{y}): hom({x},{y})*v({y}) is not below v({x})")]
    PresheafLaw { x: String, y: String },

    #[error("copresheaf law fails at ({x},{y}): v({x})*hom({x},{y}) is not below v({y})")]
    CopresheafLaw { x: String, y: String },

    #[error("not a functor: hom({x},{y}) is not below hom({fx},{fy}) in the target")]
    NotAFunctor { x: String, y: String, fx: String, fy: String },

    #[error("budget exceeded for {task}: needs {needed}, budget {budget}")]
    BudgetExceeded { task: String, needed: u128, budget: u128 },

    #[error("self-enrichment case must be 1..=4, got {0}")]
    InvalidCase(u8),

    #[error("{side} transport leaves the chosen class: image of {member} is not in the class")]
    ClassNotClosed { side: &'static str, member: String },

    #[error("randomized sweep failed in round {round}: {law}")]
    SweepFailed { round: usize, law: String },

    #[error("space is not {}complete: weight {weight} has no witness", if *.colimit { "co" } else { "" })]
    Incomplete { colimit: bool, weight: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("schema: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
