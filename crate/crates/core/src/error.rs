use std::fmt;

use thiserror::Error;

/// Pipeline stage an error surfaced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Grid,
    Covering,
    BlendPoints,
    LocalFit,
    Shepard,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Grid => "grid",
            Stage::Covering => "covering",
            Stage::BlendPoints => "blend points",
            Stage::LocalFit => "local fit",
            Stage::Shepard => "shepard basis",
        };
        f.write_str(s)
    }
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed data or parameters.
    Input,
    /// Well-formed input that violates a mathematical precondition.
    Precondition,
    /// A construction invariant failed; indicates a bug or a degenerate mesh.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid gap specification: {0}")]
    InvalidGaps(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nodes are not equispaced (interval {index} deviates from the uniform step)")]
    NotEquispaced { index: usize },

    #[error("no admissible window spans {steps} node steps without crossing a gap")]
    NoAdmissibleWindow { steps: usize },

    #[error("mesh condition violated for d = {d}: h_min = {h_min} < h_max_d = {h_max_d}")]
    MeshCondition { d: usize, h_min: f64, h_max_d: f64 },

    #[error("cover interval {index} holds {found} nodes, at least {required} required")]
    CoverNodeCount {
        index: usize,
        found: usize,
        required: usize,
    },

    #[error("cannot share blend points on cover interval {index}: {reason}")]
    BlendSharing { index: usize, reason: String },

    #[error("least-squares degree {degree} exceeds {max} on cover interval {index}")]
    DegreeTooHigh {
        index: usize,
        degree: usize,
        max: usize,
    },

    #[error("x = {x} lies outside the Xi domain")]
    OutsideXi { x: f64 },

    #[error("bound hypothesis violated: mu = {mu} must exceed (n_max + 2) / K = {threshold}")]
    BoundHypothesis { mu: u32, threshold: f64 },

    #[error("CSV row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: Stage) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidSignal(_)
            | Error::InvalidGaps(_)
            | Error::InvalidParameter(_)
            | Error::NotEquispaced { .. }
            | Error::DegreeTooHigh { .. }
            | Error::Csv { .. }
            | Error::Io(_) => ErrorKind::Input,
            Error::NoAdmissibleWindow { .. }
            | Error::MeshCondition { .. }
            | Error::BlendSharing { .. }
            | Error::OutsideXi { .. }
            | Error::BoundHypothesis { .. } => ErrorKind::Precondition,
            Error::CoverNodeCount { .. } => ErrorKind::Internal,
            Error::Stage { source, .. } => source.kind(),
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
