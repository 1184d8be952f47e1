use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification, mapped onto CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad syntax, invalid model data, I/O.
    Input,
    /// The input is well formed but the requested computation does not apply.
    Precondition,
    /// Two routes disagreed or a computed object failed verification.
    Internal,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Input => 1,
            ErrorKind::Precondition => 2,
            ErrorKind::Internal => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("generator `{name}` has degree {degree}: not simply connected (degrees must be >= 2)")]
    NotSimplyConnected { name: String, degree: u32 },
    #[error("invalid generator name `{0}`")]
    InvalidName(String),
    #[error("elements do not belong to the same algebra")]
    AlgebraMismatch,
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown generator `{name}` at offset {pos}")]
    UnknownGenerator { name: String, pos: usize },
    #[error("odd generator `{name}` raised to a power > 1 at offset {pos}")]
    OddPower { name: String, pos: usize },
    #[error("d({generator}) must have degree {expected}, found {found}")]
    DegreeMismatch { generator: String, expected: u32, found: String },
    #[error("d({generator}) = {image} has a component of word-length < 2: model is not minimal")]
    NotMinimal { generator: String, image: String },
    #[error("d(d({generator})) = {value}, expected 0")]
    DSquareNonzero { generator: String, value: String },
    #[error("the differential is zero, so k is undefined")]
    ZeroDifferential,
    #[error("model is not elliptic: {0}")]
    NotElliptic(String),
    #[error("ellipticity undecided after scanning degrees up to {0}; raise --max-degree")]
    EllipticityInconclusive(u32),
    #[error("operation requires k = 3, model has {0}")]
    WrongK(String),
    #[error("model is not pure: {0}")]
    NotPure(String),
    #[error("Murillo's formula needs at least as many odd as even generators ({odd} < {even})")]
    TooFewOdd { odd: usize, even: usize },
    #[error("filtered pair invariant violated: {0}")]
    InvalidPair(String),
    #[error("start element is not a δ-cocycle: δ = {0}")]
    NotDeltaCocycle(String),
    #[error("the class is zero")]
    ZeroClass,
    #[error("dim H^{degree} = {dimension}, expected a one-dimensional top class")]
    TopClassDimension { degree: u32, dimension: usize },
    #[error("oracle and spectral Toomer invariants disagree: oracle {oracle}, spectral {spectral}")]
    Disagreement { oracle: usize, spectral: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}:{line}:{column}: {msg}")]
    ModelFile { path: String, line: usize, column: usize, msg: String },
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            NotElliptic(_)
            | EllipticityInconclusive(_)
            | WrongK(_)
            | NotPure(_)
            | ZeroDifferential
            | TooFewOdd { .. } => ErrorKind::Precondition,
            TopClassDimension { .. } | Disagreement { .. } | Internal(_) => ErrorKind::Internal,
            _ => ErrorKind::Input,
        }
    }
}
