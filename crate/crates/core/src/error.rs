use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("selection has zero graduates{}", context_suffix(.context))]
    ZeroPopulation { context: String },

    #[error("group `{group}` has zero degrees across all fields{}", context_suffix(.context))]
    EmptyCohort { group: String, context: String },

    #[error("label `{label}` is not part of the active category scheme ({axis})")]
    SchemeMismatch { label: String, axis: &'static str },

    #[error("equitability needs at least 2 categories, got k = {k}")]
    DegenerateK { k: usize },

    #[error("distributions are defined over different categories: {reason}")]
    CategoryMismatch { reason: String },

    #[error("unknown group `{descriptor}`")]
    UnknownGroup { descriptor: String },

    #[error("empty year range {start}-{end}")]
    EmptyRange { start: i32, end: i32 },

    #[error("unknown institution `{id}`")]
    UnknownInstitution { id: String },

    #[error("invalid value for `{parameter}`: {reason}")]
    InvalidParameter { parameter: String, reason: String },

    #[error("source is missing column `{column}`")]
    MissingColumn { column: String },

    #[error("line {line}: negative count {value} in column `{column}`")]
    NegativeCount { line: u64, column: String, value: i64 },

    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("column map line {line}: {reason}")]
    ColumnMap { line: usize, reason: String },

    #[error("chart payload is empty")]
    EmptyPayload,

    #[error("chart kind {kind} does not match a {payload} payload")]
    KindMismatch { kind: String, payload: String },

    #[error("dataset at {path} is corrupt: {reason}")]
    ManifestCorrupt { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn context_suffix(context: &str) -> String {
    if context.is_empty() {
        String::new()
    } else {
        format!(" ({context})")
    }
}

impl Error {
    /// Stable machine-readable name, shared by the CLI and the HTTP API.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroPopulation { .. } => "zero_population",
            Error::EmptyCohort { .. } => "empty_cohort",
            Error::SchemeMismatch { .. } => "scheme_mismatch",
            Error::DegenerateK { .. } => "degenerate_k",
            Error::CategoryMismatch { .. } => "category_mismatch",
            Error::UnknownGroup { .. } => "unknown_group",
            Error::EmptyRange { .. } => "empty_range",
            Error::UnknownInstitution { .. } => "unknown_institution",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::MissingColumn { .. } => "missing_column",
            Error::NegativeCount { .. } => "negative_count",
            Error::MalformedRow { .. } => "malformed_row",
            Error::ColumnMap { .. } => "column_map",
            Error::EmptyPayload => "empty_payload",
            Error::KindMismatch { .. } => "kind_mismatch",
            Error::ManifestCorrupt { .. } => "manifest_corrupt",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn zero_population(context: impl Into<String>) -> Self {
        Error::ZeroPopulation {
            context: context.into(),
        }
    }

    /// An invalid-parameter error naming the offending parameter.
    pub fn invalid(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            parameter: parameter.into(),
            reason: reason.into(),
        }
    }
}
