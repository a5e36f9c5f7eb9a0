use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cutoff must be at least {min}, got {limit}")]
    InvalidCutoff { limit: u64, min: u64 },

    #[error("modulus must be at least 1, got {modulus}")]
    InvalidModulus { modulus: u64 },

    #[error("modulus {modulus} too large for table construction (max {max})")]
    ModulusTooLarge { modulus: u64, max: u64 },

    #[error("residue class {class} is not invertible mod {modulus}")]
    InvalidClass { class: u64, modulus: u64 },

    #[error(
        "character {label} mod {modulus} is non-primitive (conductor {conductor}); \
         evaluate its primitive parent and apply the decomposition compensation instead"
    )]
    NonPrimitive {
        modulus: u64,
        label: usize,
        conductor: u64,
    },

    #[error("character {label} mod {modulus} is not quadratic (order {order})")]
    NotQuadratic {
        modulus: u64,
        label: usize,
        order: u64,
    },

    #[error("no character mod {modulus} with the requested datum")]
    NoSuchCharacter { modulus: u64 },

    #[error("character label {label} out of range for modulus {modulus} (phi = {phi})")]
    NoSuchLabel {
        modulus: u64,
        label: usize,
        phi: u64,
    },

    #[error("moduli {a} and {b} must be coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("digamma pole at non-positive integer {re}")]
    DigammaPole { re: f64 },

    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    #[error("grid of {points} points exceeds the configured cap of {max}")]
    GridTooLarge { points: u64, max: u64 },

    #[error("invalid epsilon mode `{given}` (expected `zero`, `paper`, or a non-negative number)")]
    InvalidEpsilon { given: String },

    #[error("{path}:{line}: {reason}")]
    ZeroTableParse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("zero table required for {needed_for}: pass --zeros with a table covering it")]
    MissingZeroTable { needed_for: String },

    #[error("invalid request: {reason}")]
    InvalidRequest { reason: String },

    #[error("scan file {path}: {reason}")]
    ScanParse { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
