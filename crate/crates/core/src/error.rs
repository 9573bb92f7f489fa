use std::fmt;

/// Errors shared by all modules.
///
/// Domain errors carry enough context to render a structured error object on
/// the CLI; they are not meant to be matched on message text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The zero vector was passed where a nonzero vector is required.
    ZeroVector,
    /// Q(v,v) = 0: the square-free/square decomposition is undefined.
    IsotropicVector,
    /// The symmetric form has determinant zero.
    DegenerateForm,
    /// Signature out of range for a standard chart (needs r >= s >= 1).
    BadSignature { r: usize, s: usize },
    /// Matrix or vector dimensions do not match.
    DimensionMismatch { expected: String, got: String },
    /// Parabolic membership asked of a matrix outside the Lie algebra.
    NotInLieAlgebra,
    /// Diagonal matrix is not in the group (a_i * a_{r+i} != 1 or middle != 1).
    NotInGroup,
    /// Index outside {r+1, .., m}.
    BadIndex { index: usize },
    /// Reconstruction hit a zero coordinate that must be divided by.
    ZeroDivisor,
    /// Projected data is not consistent with any point on the quadric.
    NotOnQuadric,
    /// Enumeration region is unbounded; a finite box is mandatory.
    RegionUnbounded,
    /// Fewer than three nonzero counts: no slope can be fit.
    InsufficientData,
    /// A half-integer power of p survived to the end of a density evaluation.
    /// This indicates an implementation bug, never bad input.
    NonCancellingHalfPower,
    /// Density query violates its invariants (p odd prime, p coprime to
    /// 2 * u * det, u square-free, supported rank).
    UnsupportedQuery(String),
    /// Brute-force precision would exceed the configured budget.
    PrecisionTooLarge { p: u64, e: u32, budget: u64 },
    /// Hypersurface degree below the supported range (d >= 5).
    BadDegree { d: i64 },
    /// (g, k) outside 1 <= k <= g-1, g >= 2.
    BadRange { g: i64, k: i64 },
    /// e * e != e.
    NotIdempotent,
    /// e = 0 or e = 1 has no denominator theory.
    TrivialIdempotent,
    /// Internal cross-check failed on data that should have been consistent.
    InconsistentData(String),
    /// A value exceeded a documented size cap (e.g. |qbar| >= 2^63).
    ValueTooLarge(String),
    /// Malformed input (file contents, rational strings, flag values).
    BadInput(String),
    /// Underlying I/O failure, stringified to keep the error type cloneable.
    Io(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroVector => "ZeroVector",
            Error::IsotropicVector => "IsotropicVector",
            Error::DegenerateForm => "DegenerateForm",
            Error::BadSignature { .. } => "BadSignature",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotInLieAlgebra => "NotInLieAlgebra",
            Error::NotInGroup => "NotInGroup",
            Error::BadIndex { .. } => "BadIndex",
            Error::ZeroDivisor => "ZeroDivisor",
            Error::NotOnQuadric => "NotOnQuadric",
            Error::RegionUnbounded => "RegionUnbounded",
            Error::InsufficientData => "InsufficientData",
            Error::NonCancellingHalfPower => "NonCancellingHalfPower",
            Error::UnsupportedQuery(_) => "UnsupportedQuery",
            Error::PrecisionTooLarge { .. } => "PrecisionTooLarge",
            Error::BadDegree { .. } => "BadDegree",
            Error::BadRange { .. } => "BadRange",
            Error::NotIdempotent => "NotIdempotent",
            Error::TrivialIdempotent => "TrivialIdempotent",
            Error::InconsistentData(_) => "InconsistentData",
            Error::ValueTooLarge(_) => "ValueTooLarge",
            Error::BadInput(_) => "BadInput",
            Error::Io(_) => "Io",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroVector => write!(f, "the zero vector is not allowed here"),
            Error::IsotropicVector => {
                write!(f, "Q(v,v) = 0: square-free/square invariants are undefined")
            }
            Error::DegenerateForm => write!(f, "symmetric form is degenerate (det = 0)"),
            Error::BadSignature { r, s } => {
                write!(f, "signature ({r},{s}) not supported; need r >= s >= 1")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NotInLieAlgebra => write!(f, "matrix is not in the Lie algebra"),
            Error::NotInGroup => write!(f, "diagonal matrix is not in the group"),
            Error::BadIndex { index } => write!(f, "index {index} out of range"),
            Error::ZeroDivisor => write!(f, "recovered coordinate is zero; cannot divide"),
            Error::NotOnQuadric => write!(f, "data does not lie on the quadric"),
            Error::RegionUnbounded => {
                write!(f, "region is unbounded; supply a finite box")
            }
            Error::InsufficientData => {
                write!(f, "fewer than three nonzero counts; cannot fit a slope")
            }
            Error::NonCancellingHalfPower => {
                write!(f, "internal error: a p^(1/2) factor failed to cancel")
            }
            Error::UnsupportedQuery(msg) => write!(f, "unsupported query: {msg}"),
            Error::PrecisionTooLarge { p, e, budget } => write!(
                f,
                "p^(2e) = {p}^{} exceeds the configured budget {budget}",
                2 * e
            ),
            Error::BadDegree { d } => write!(f, "degree d = {d} out of range (need d >= 5)"),
            Error::BadRange { g, k } => {
                write!(f, "(g,k) = ({g},{k}) out of range (need g >= 2, 1 <= k <= g-1)")
            }
            Error::NotIdempotent => write!(f, "matrix does not satisfy e*e = e"),
            Error::TrivialIdempotent => write!(f, "idempotent is 0 or the identity"),
            Error::InconsistentData(msg) => write!(f, "inconsistent data: {msg}"),
            Error::ValueTooLarge(msg) => write!(f, "value too large: {msg}"),
            Error::BadInput(msg) => write!(f, "bad input: {msg}"),
            Error::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
