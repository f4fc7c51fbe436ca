use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: missing field `{field}`")]
    MissingField { line: usize, field: String },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("split is already adapted to the 3-class schema")]
    AlreadyAdapted,

    #[error("operation requires the adapted 3-class schema")]
    NotAdapted,

    #[error("unknown class {class} (schema has {classes} classes)")]
    UnknownClass { class: usize, classes: usize },

    #[error("cannot keep {requested} records of class {class}: only {available} present")]
    DownsampleTooLarge {
        class: usize,
        requested: usize,
        available: usize,
    },

    #[error("split is empty")]
    EmptySplit,

    #[error("record {id}: {reason}")]
    InvalidRecord { id: String, reason: String },

    #[error("record {id}: probability vector is not a distribution")]
    NotADistribution { id: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("record {id}: mixed kinds, expected {expected}")]
    MixedKinds { id: String, expected: String },

    #[error("ids without a prediction: {0:?}")]
    MissingPredictions(Vec<String>),

    #[error("predictions for ids not in the dataset: {0:?}")]
    ExtraPredictions(Vec<String>),

    #[error("record {id}: gold mismatch (prediction file says {prediction}, dataset says {dataset})")]
    GoldMismatch {
        id: String,
        prediction: usize,
        dataset: usize,
    },

    #[error("{0}")]
    WrongKind(String),

    #[error("score {0} is not finite")]
    NonFiniteScore(f64),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no instances")]
    NoInstances,

    #[error("ROC-AUC needs at least two gold classes")]
    SingleClass,

    #[error("cross-balancing undefined for empty class {0}")]
    EmptyClass(usize),

    #[error("iteration {iteration} out of range (plan has {iterations})")]
    IterationOutOfRange { iteration: usize, iterations: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("metric mismatch: {0:?} vs {1:?}")]
    MetricMismatch(String, String),

    #[error("model {model:?} has {count} scores, at least 2 required")]
    TooFewScores { model: String, count: usize },

    #[error("duplicate model {0:?}")]
    DuplicateModel(String),

    #[error("need at least 2 models, got {0}")]
    TooFewModels(usize),

    #[error("duplicate row {0:?}")]
    DuplicateDescriptor(String),

    #[error("unknown format {0:?}")]
    UnknownFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
