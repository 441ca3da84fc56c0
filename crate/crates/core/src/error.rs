use thiserror::Error;

/// A single invariant violation found while validating C-complex data.
///
/// Violations are data, not failures: `validate` collects all of them
/// instead of stopping at the first one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Wrong number of stored generalized Seifert matrices.
    MatrixCount { expected: usize, found: usize },
    /// A stored matrix is not g-by-g.
    MatrixShape { key: String, rows: usize, cols: usize, expected: usize },
    /// A sign vector with epsilon_1 = +1 is missing from the family.
    MissingSignVector { key: String },
    /// A key that is not a valid sign vector with epsilon_1 = +1.
    BadSignVector { key: String },
    /// beta0 must be at least 1.
    BadBeta0 { found: usize },
    /// mu must be at least 1.
    BadMu { found: usize },
    /// components_per_color must have one positive entry per color.
    ComponentsLength { expected: usize, found: usize },
    ComponentCount { color: usize, found: usize },
    /// The linking matrix must be mu-by-mu.
    LinkingShape { rows: usize, cols: usize, expected: usize },
    /// Sublink self-linking is zero by convention.
    LinkingDiagonal { index: usize, found: i64 },
    LinkingAsymmetric { row: usize, col: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::MatrixCount { expected, found } => {
                write!(f, "expected {expected} stored matrices, found {found}")
            }
            Violation::MatrixShape { key, rows, cols, expected } => {
                write!(f, "matrix {key} is {rows}x{cols}, expected {expected}x{expected}")
            }
            Violation::MissingSignVector { key } => write!(f, "missing sign vector {key}"),
            Violation::BadSignVector { key } => {
                write!(f, "invalid sign vector key {key} (need length mu and leading '+')")
            }
            Violation::BadBeta0 { found } => write!(f, "beta0 must be >= 1, found {found}"),
            Violation::BadMu { found } => write!(f, "mu must be >= 1, found {found}"),
            Violation::ComponentsLength { expected, found } => {
                write!(f, "components_per_color has {found} entries, expected {expected}")
            }
            Violation::ComponentCount { color, found } => {
                write!(f, "color {color} has {found} components, expected >= 1")
            }
            Violation::LinkingShape { rows, cols, expected } => {
                write!(f, "linking matrix is {rows}x{cols}, expected {expected}x{expected}")
            }
            Violation::LinkingDiagonal { index, found } => {
                write!(f, "linking diagonal entry {index} is {found}, must be 0")
            }
            Violation::LinkingAsymmetric { row, col } => {
                write!(f, "linking matrix is asymmetric at ({row},{col})")
            }
        }
    }
}

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VariableMismatch { left: usize, right: usize },

    #[error("invalid C-complex data: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    /// The approximate backend refuses to classify an eigenvalue whose
    /// magnitude falls inside the refusal window around the tolerance.
    #[error(
        "indeterminate inertia: |eigenvalue| = {magnitude:e} lies inside ({window_lo:e}, {window_hi:e}); \
         raise the precision or adjust the tolerance"
    )]
    IndeterminateInertia { magnitude: f64, window_lo: f64, window_hi: f64 },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("inconsistent classification: {0}")]
    Inconsistency(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
