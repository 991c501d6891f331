//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no solution: {0}")]
    Unsolvable(String),

    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),

    #[error("incompatible networks: {0}")]
    IncompatibleNetwork(String),

    #[error("port {port} out of range for a {n_ports}-port network")]
    InvalidPort { port: usize, n_ports: usize },

    #[error("cannot join port {0} to itself")]
    SelfConnection(usize),

    #[error("termination |reflection| = {0} exceeds 1 (active loads are not supported)")]
    ActiveLoad(f64),

    #[error("unsupported Butler order {0}")]
    UnsupportedOrder(usize),

    #[error("progressive phase {phase_deg} deg has no real beam for spacing {spacing} wavelengths")]
    NoRealBeam { phase_deg: f64, spacing: f64 },

    #[error("array contour has no real solution at eta = {eta}")]
    UnsolvableAperture { eta: f64 },

    #[error("lens geometry error: {0}")]
    Geometry(String),

    #[error("infeasible port layout: {0}")]
    InfeasibleLayout(String),

    #[error("empty feasible range: {0}")]
    EmptyRange(String),

    #[error("excitation needs at least 2 elements, got {0}")]
    TooFewElements(usize),

    #[error("relative phase undefined: element {0} has zero amplitude")]
    UndefinedRatio(usize),

    #[error("beam metrics undefined: {0}")]
    MetricsUndefined(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse classification used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Parse,
    Solver,
    Infeasible,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Io => 1,
            ErrorCategory::Config => 2,
            ErrorCategory::Parse => 3,
            ErrorCategory::Solver => 4,
            ErrorCategory::Infeasible => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Io => "io",
            ErrorCategory::Config => "config",
            ErrorCategory::Parse => "parse",
            ErrorCategory::Solver => "solver",
            ErrorCategory::Infeasible => "infeasible",
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Config(_) | InvalidParameter(_) | UnsupportedOrder(_) | InvalidPort { .. } => ErrorCategory::Config,
            Parse { .. } | TooFewElements(_) => ErrorCategory::Parse,
            UnsolvableAperture { .. } | Geometry(_) | InfeasibleLayout(_) | EmptyRange(_) => ErrorCategory::Infeasible,
            Io(_) => ErrorCategory::Io,
            Unsolvable(_)
            | DegenerateNetwork(_)
            | IncompatibleNetwork(_)
            | SelfConnection(_)
            | ActiveLoad(_)
            | NoRealBeam { .. }
            | UndefinedRatio(_)
            | MetricsUndefined(_) => ErrorCategory::Solver,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
