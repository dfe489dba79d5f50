use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report, grouped by the stage that raises it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // -- model spec parsing --
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported spec version header: {0}")]
    UnsupportedVersion(String),
    #[error("indicator `{indicator}` is assigned to both `{first}` and `{second}`")]
    DuplicateIndicator {
        indicator: String,
        first: String,
        second: String,
    },
    #[error("construct `{0}` is declared more than once")]
    DuplicateConstruct(String),
    #[error("unknown construct `{0}`")]
    UnknownConstruct(String),
    #[error("structural edges contain a cycle through `{0}`")]
    Cycle(String),
    #[error("outcome `{0}` has no incoming edge")]
    OutcomeNoIncoming(String),
    #[error("no outcome construct declared")]
    MissingOutcome,
    #[error("invalid second-order construct `{name}`: {reason}")]
    InvalidSecondOrder { name: String, reason: String },
    #[error("marker block `{0}` must not appear in structural edges")]
    MarkerInStructure(String),
    #[error("construct `{0}` has no indicators")]
    EmptyBlock(String),

    // -- dataset loading and validation --
    #[error("I/O error: {0}")]
    Io(String),
    #[error("dataset is missing indicator column `{0}`")]
    MissingColumn(String),
    #[error("non-numeric cell `{value}` at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("value {value} at row {row}, column `{column}` is outside the scale [{low}, {high}]")]
    OutOfRange {
        row: usize,
        column: String,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("estimation column `{0}` is constant")]
    ConstantColumn(String),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    // -- numerical contracts --
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero variance: {0}")]
    ZeroVariance(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("undefined statistic: {0}")]
    Undefined(String),
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    // -- estimation and inference --
    #[error("construct `{0}` has no structural parents")]
    NoParents(String),
    #[error("all {0} bootstrap replicates failed")]
    AllReplicatesFailed(usize),
    #[error("unknown effect `{0}`")]
    UnknownEffect(String),

    // -- classification --
    #[error("binary task has a single class")]
    SingleClass,
    #[error("stratified {folds}-fold split infeasible: minority class has {minority} rows")]
    StratificationInfeasible { folds: usize, minority: usize },
    #[error("no decile yields a usable two-class task")]
    NoFeasibleDecile,
    #[error("unknown classifier `{0}`")]
    UnknownClassifier(String),

    // -- reports and comparisons --
    #[error("metric `{0}` is missing")]
    MissingMetric(String),
    #[error("bundle is incomplete: {0}")]
    IncompleteBundle(String),
    #[error("bundle sections disagree: {0}")]
    InconsistentBundle(String),
    #[error("serialization error: {0}")]
    Serialization(String),
    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

/// Failure classes with distinct process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    Input,
    Validation,
    Estimation,
    Other,
}

impl FailureClass {
    pub fn exit_code(self) -> i32 {
        match self {
            FailureClass::Input => 2,
            FailureClass::Validation => 3,
            FailureClass::Estimation => 4,
            FailureClass::Other => 1,
        }
    }
}

impl Error {
    pub fn class(&self) -> FailureClass {
        use Error::*;
        match self {
            Syntax { .. } | UnsupportedVersion(_) | Io(_) | NonNumeric { .. } | Serialization(_) | Config(_) | InconsistentBundle(_) => {
                FailureClass::Input
            }
            DuplicateIndicator { .. }
            | DuplicateConstruct(_)
            | UnknownConstruct(_)
            | Cycle(_)
            | OutcomeNoIncoming(_)
            | MissingOutcome
            | InvalidSecondOrder { .. }
            | MarkerInStructure(_)
            | EmptyBlock(_)
            | MissingColumn(_)
            | MissingValue { .. }
            | OutOfRange { .. }
            | ConstantColumn(_)
            | TooFewRows { .. } => FailureClass::Validation,
            ZeroVariance(_) | Singular(_) | NotPositiveDefinite(_) | NoParents(_) | AllReplicatesFailed(_) | Undefined(_) => {
                FailureClass::Estimation
            }
            _ => FailureClass::Other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}
