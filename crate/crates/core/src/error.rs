use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("trajectory left the state box at t = {time}")]
    DomainExit {
        time: f64,
        partial: crate::systems::Trajectory,
    },

    #[error("certificate infeasible: {0}")]
    CertificateInfeasible(String),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("no path to requested endpoint")]
    NoPath,

    #[error("Hausdorff distance undefined for an empty set")]
    EmptySet,

    #[error("lattice has no boundary nodes; clearance would be +inf everywhere")]
    NoObstacle,

    #[error("trajectory is not admissible on the graph: {0}")]
    InadmissibleTrajectory(String),

    #[error("search radius {0} below grid resolution")]
    Resolution(f64),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("scenario parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
