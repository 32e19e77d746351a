//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The ray vectors do not generate the lattice N over Z.
    NotGenerating,
    /// Kernel rank does not equal r - n.
    RankDeficient { expected: usize, found: usize },
    /// The stability vector lies outside the cone spanned by the divisor classes.
    EmptyAnticones,
    /// The stability vector lies on a wall of the GIT fan.
    WallEta,
    /// A cone complement is linearly dependent.
    NotSimplicial(Vec<usize>),
    /// The extended Mori cone contains a line; curve-class enumeration would not terminate.
    UnboundedEnumeration,
    /// Random localization parameters hit a wall after bounded retries.
    DegenerateParameters,
    /// Polynomial degree exceeds the dimension of the target sector.
    DegreeMismatch { degree: usize, dim: usize },
    /// Gamma evaluated at a nonpositive integer.
    PoleAt(f64),
    /// A Gamma argument in the I-function is identically a nonpositive integer.
    GammaPole { ray: usize },
    /// Residue oracle requires a rank-one gauge group.
    KNotOne { k: usize },
    /// Series terms failed to decay within the degree bound.
    NotConverging { detail: String },
    /// Closed-form central charge evaluated outside Re > 0 domain.
    DomainError { ray: usize, re: f64 },
    /// Grade-restriction margin is nonpositive; the contour integral diverges.
    ConvergenceMarginTooSmall { margin: f64 },
    /// Adaptive quadrature exceeded its subdivision budget.
    MaxSubdivisions,
    /// Fiber chart imaginary parts leave the admissible window.
    StripViolation { ray: usize, theta: f64 },
    /// Could not certify the truncation tail of an oscillatory integral.
    TailNotCertified { detail: String },
    /// The index set does not span a cone of the fan.
    NotACone(Vec<usize>),
    /// The ray polytope is not strictly convex with rays as vertices.
    NotFanoPolytope,
    /// Two central-charge methods disagree beyond tolerance.
    MismatchBeyondTolerance { residual: f64, detail: String },
    /// Configuration file could not be parsed.
    ParseError(String),
    /// Configuration violates the schema; one entry per violation, with JSON-pointer paths.
    SchemaError(Vec<String>),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotGenerating => write!(f, "ray vectors do not generate N over Z"),
            Error::RankDeficient { expected, found } => {
                write!(f, "kernel rank {found}, expected {expected}")
            }
            Error::EmptyAnticones => write!(f, "stability vector admits no anticones"),
            Error::WallEta => write!(f, "stability vector lies on a GIT wall"),
            Error::NotSimplicial(i) => write!(f, "rays {i:?} are linearly dependent"),
            Error::UnboundedEnumeration => {
                write!(f, "extended Mori cone contains a line; enumeration unbounded")
            }
            Error::DegenerateParameters => {
                write!(f, "generic localization parameters degenerate after retries")
            }
            Error::DegreeMismatch { degree, dim } => {
                write!(f, "polynomial degree {degree} exceeds sector dimension {dim}")
            }
            Error::PoleAt(x) => write!(f, "gamma pole at {x}"),
            Error::GammaPole { ray } => write!(f, "gamma argument identically nonpositive integer at ray {ray}"),
            Error::KNotOne { k } => write!(f, "residue oracle needs k = 1, got k = {k}"),
            Error::NotConverging { detail } => write!(f, "series not converging: {detail}"),
            Error::DomainError { ray, re } => {
                write!(f, "closed form needs Re > 0 at ray {ray}, got {re}")
            }
            Error::ConvergenceMarginTooSmall { margin } => {
                write!(f, "grade-restriction margin {margin} is not positive")
            }
            Error::MaxSubdivisions => write!(f, "quadrature subdivision budget exhausted"),
            Error::StripViolation { ray, theta } => {
                write!(f, "chart angle {theta} at ray {ray} outside admissible window")
            }
            Error::TailNotCertified { detail } => write!(f, "tail not certified: {detail}"),
            Error::NotACone(i) => write!(f, "index set {i:?} does not span a cone"),
            Error::NotFanoPolytope => write!(f, "ray polytope is not strictly convex with rays as vertices"),
            Error::MismatchBeyondTolerance { residual, detail } => {
                write!(f, "methods disagree (residual {residual:.3e}): {detail}")
            }
            Error::ParseError(m) => write!(f, "parse error: {m}"),
            Error::SchemaError(v) => write!(f, "schema violations: {}", v.join("; ")),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
