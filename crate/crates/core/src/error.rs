use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh too coarse: arc {arc} received {sites} boundary sites (need >= 2)")]
    MeshTooCoarse { arc: usize, sites: usize },
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("unknown dual vertex {0:?}")]
    UnknownVertex((i32, i32, bool)),
    #[error("unknown arc index {0}")]
    UnknownArc(usize),
    #[error("domain has {found} marked points, expected {expected}")]
    WrongMarkedPointCount { expected: usize, found: usize },
    #[error("annular sector contains no sites")]
    EmptyRegion,
    #[error("domain has {0} sites, exact enumeration capped at {1}")]
    TooManySites(usize, usize),
    #[error("argument {value} outside valid range {range}")]
    OutOfRange { value: f64, range: &'static str },
    #[error("unsupported domain for this operation: {0}")]
    UnsupportedDomain(String),
    #[error("quadrature failed to converge (estimated error {0:.3e})")]
    QuadratureFailure(f64),
    #[error("point lies outside the map domain")]
    OutOfDomain,
    #[error("evaluation point within {0:.1e} of a kernel pole")]
    NearPole(f64),
    #[error("face touches the boundary; dbar needs all three dual neighbors")]
    BoundaryFace,
    #[error("point not covered by any complete hexagonal face")]
    OutsideCoveredRegion,
    #[error("statistical floor: |estimate - limit| < 3 stderr at {0} of {1} scale points")]
    StatisticalFloor(usize, usize),
    #[error("event never observed at scale {0}")]
    ZeroCount(f64),
    #[error("degenerate fit input: {0}")]
    DegeneratePoints(String),
    #[error("config parse error: {0}")]
    ParseError(String),
    #[error("config validation error: {0}")]
    ValidationError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
