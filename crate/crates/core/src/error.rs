//! Error types shared across the crate.

use thiserror::Error;

/// Errors from map construction, evaluation, and composition.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("point or map does not match the space kind: {0}")]
    KindMismatch(String),
    #[error("argument {0} lies outside the map domain [{1}, {2}]")]
    OutsideDomain(String, String, String),
    #[error("image of inner map escapes outer domain: {0}")]
    DomainEscape(String),
    #[error("map is not injective; no inverse exists")]
    NotInjective,
    #[error("maps live on different domains: {0}")]
    DomainMismatch(String),
    #[error("composition exceeded the breakpoint budget ({0} > {1})")]
    ResourceLimit(usize, usize),
    #[error("structural operation unavailable for quadratic-piece maps: {0}")]
    StructuralUnavailable(String),
    #[error("invalid construction: {0}")]
    Invalid(String),
    #[error("empty or inverted region: {0}")]
    EmptyRegion(String),
    #[error("system is not periodic")]
    NotPeriodic,
    #[error("witness search failed at step {0}; this indicates an engine bug")]
    WitnessSearch(u64),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

/// Errors from parsing the JSON and CLI-string surfaces.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("bad rational: {0}")]
    Rational(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document violates an invariant: {0}")]
    Invalid(String),
    #[error("unknown corpus system: {0}")]
    UnknownSystem(String),
    #[error(transparent)]
    Map(#[from] MapError),
}
