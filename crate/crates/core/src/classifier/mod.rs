//! Per-component point-cloud classification.
//!
//! Each track's accumulated cloud is reduced to a fixed number of points
//! and scored by either the built-in geometric baseline or an external
//! process speaking a line-delimited JSON protocol. Both consume the
//! component's class prior.

mod external;
mod geometric;
mod sampling;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use external::{
    ClassifierRequest, ClassifierResponse, ExternalClassifier, ExternalOutcome, DEFAULT_TIMEOUT,
};
pub use geometric::{classify_geometric, GeometricFeatures};
pub use sampling::{sample_points, SampledCloud};

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("cannot sample from an empty cloud")]
    EmptyCloud,
    #[error("failed to start classifier process: {0}")]
    Spawn(#[source] std::io::Error),
    #[error("classifier timed out after {0} ms")]
    Timeout(u64),
    #[error("malformed classifier response: {0}")]
    MalformedResponse(String),
    #[error("classifier process unavailable: {0}")]
    Unavailable(String),
}

/// Which classifier backs the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    #[default]
    GeometricBaseline,
    ExternalProtocol,
}
