use thiserror::Error;

/// Everything that can go wrong inside the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("invalid stretch {0}: stretches must be positive")]
    InvalidStretch(f64),

    #[error("stress {stress} is outside the model range (must exceed {limit})")]
    StressOutOfModelRange { stress: f64, limit: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("invalid growth field: {0}")]
    InvalidGrowthField(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("incompatible state: {0}")]
    IncompatibleState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("envelope violation at t={t}: cell {cell} has G={value}, allowed ({lower}, {upper})")]
    EnvelopeViolation {
        t: f64,
        cell: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("positivity lost at t={t}: cell {cell} has G={value}; reduce dt")]
    PositivityLoss { t: f64, cell: usize, value: f64 },

    #[error("at t={t}: {source}")]
    AtTime { t: f64, source: Box<Error> },
}

impl Error {
    /// Attach a time stamp unless one is already present.
    pub fn at_time(self, t: f64) -> Self {
        match self {
            e @ (Error::AtTime { .. }
            | Error::EnvelopeViolation { .. }
            | Error::PositivityLoss { .. }) => e,
            e => Error::AtTime {
                t,
                source: Box::new(e),
            },
        }
    }

    /// The error with any time stamp removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
