use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate record for dataset `{dataset}` and configuration `{config}`")]
    DuplicateRecord { dataset: String, config: String },

    #[error("invalid value{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    InvalidValue { line: Option<u64>, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("configuration `{config}` is listed with different group sets")]
    InconsistentMembership { config: String },

    #[error("group `{0}` is not in the catalog")]
    UnknownGroup(String),

    #[error("no meta-features for dataset `{0}`")]
    MissingMetaFeatures(String),

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("tree splits on feature {index} but the input has {len} features")]
    MissingFeature { index: usize, len: usize },

    #[error("confidence interval needs at least 2 values, got {0}")]
    CiUndefined(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(line: Option<u64>, message: impl Into<String>) -> Self {
        Error::InvalidValue { line, message: message.into() }
    }

    /// True for failures of the underlying reader or writer rather than of
    /// the content.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::Json(e) => e.is_io(),
            _ => false,
        }
    }
}
