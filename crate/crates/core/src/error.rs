use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes are incompatible for the named operation.
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    NotSquare {
        rows: usize,
        cols: usize,
    },
    SingularMatrix {
        pivot: f64,
        threshold: f64,
    },
    NonConvergence {
        iterations: usize,
    },
    EmptyInput(&'static str),
    ArityMismatch {
        expected: usize,
        found: usize,
    },
    LetterOutOfRange {
        letter: usize,
        arity: usize,
    },
    InvalidLayout(&'static str),
    BlockOutOfRange {
        row: usize,
        col: usize,
    },
    LengthMismatch {
        points: usize,
        directions: usize,
    },
    InvalidArgument(String),
    /// The point (or a block-lifted point) is outside the function's domain.
    DomainViolation {
        level: f64,
        bound: f64,
    },
    /// The block image of a bidiagonal point is not block upper triangular
    /// with the expected diagonal: the function does not preserve intertwining.
    StructureViolation {
        residual: f64,
        tolerance: f64,
    },
    NonScalarResult {
        word: Vec<usize>,
        residual: f64,
    },
    ExceedsConvergenceRadius {
        domain: f64,
        radius: f64,
    },
    WordCapExceeded {
        words: usize,
        cap: usize,
    },
    ResolventSingular,
    SamplerStarvation {
        accepted: usize,
        draws: usize,
    },
    PreconditionViolation {
        what: &'static str,
        residual: f64,
    },
    NonLinearInput {
        residual: f64,
    },
    /// Coefficient extraction failed for `word`.
    Extraction {
        word: Vec<usize>,
        source: alloc::boxed::Box<Error>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, left, right } => write!(
                f,
                "{op}: incompatible shapes {}x{} and {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::NotSquare { rows, cols } => write!(f, "expected a square matrix, got {rows}x{cols}"),
            Error::SingularMatrix { pivot, threshold } => {
                write!(f, "matrix is singular (pivot {pivot:e} below {threshold:e})")
            }
            Error::NonConvergence { iterations } => {
                write!(f, "iteration did not converge after {iterations} steps")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::ArityMismatch { expected, found } => {
                write!(f, "arity mismatch: expected {expected} variables, found {found}")
            }
            Error::LetterOutOfRange { letter, arity } => {
                write!(f, "letter {letter} out of range for {arity} variables")
            }
            Error::InvalidLayout(why) => write!(f, "invalid block layout: {why}"),
            Error::BlockOutOfRange { row, col } => write!(f, "block ({row}, {col}) out of range"),
            Error::LengthMismatch { points, directions } => write!(
                f,
                "expected one more point than directions, got {points} points and {directions} directions"
            ),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DomainViolation { level, bound } => {
                write!(f, "point outside domain (level {level:e}, bound {bound:e})")
            }
            Error::StructureViolation { residual, tolerance } => write!(
                f,
                "block image is not bidiagonal-compatible (residual {residual:e} > {tolerance:e})"
            ),
            Error::NonScalarResult { word, residual } => {
                write!(f, "coefficient for word {word:?} is not scalar (residual {residual:e})")
            }
            Error::ExceedsConvergenceRadius { domain, radius } => write!(
                f,
                "domain radius {domain} is not inside the convergence radius {radius}"
            ),
            Error::WordCapExceeded { words, cap } => {
                write!(f, "{words} words requested, cap is {cap}")
            }
            Error::ResolventSingular => write!(f, "realization resolvent is singular"),
            Error::SamplerStarvation { accepted, draws } => {
                write!(f, "rejection sampler starved: {accepted} accepted out of {draws} draws")
            }
            Error::PreconditionViolation { what, residual } => {
                write!(f, "precondition violated: {what} (residual {residual:e})")
            }
            Error::NonLinearInput { residual } => {
                write!(f, "map is not k-linear (additivity residual {residual:e})")
            }
            Error::Extraction { word, source } => {
                write!(f, "extraction failed for word {word:?}: {source}")
            }
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Extraction { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
