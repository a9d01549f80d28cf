use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed complex: {0}")]
    MalformedComplex(String),

    #[error("vertex labels clash: {}", .0.join(", "))]
    LabelClash(Vec<String>),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("face {{{}}} is not a maximal face", .0.join(","))]
    NotMaximal(Vec<String>),

    #[error("face {{{}}} is not a face of the complex", .0.join(","))]
    NotAFace(Vec<String>),

    #[error("no reduction step at {{{}}}: no proper vertices", .0.join(","))]
    NoReductionStep(Vec<String>),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model violates no-signalling ({} violation(s)); first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Signalling(Vec<crate::model::Violation>),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("invalid quantum input: {0}")]
    Quantum(String),

    #[error("size ceiling exceeded: {what} needs {needed}, ceiling is {ceiling}")]
    Ceiling {
        what: &'static str,
        needed: u128,
        ceiling: u128,
    },

    #[error("LP outcome failed exact verification: {0}")]
    Verification(String),

    #[error("cannot parse rational `{0}`")]
    ParseRational(String),

    #[error("document error: {0}")]
    Document(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
