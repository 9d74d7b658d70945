use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set has no Hausdorff distance")]
    EmptyHausdorff,

    #[error("second fundamental form undefined at boundary sample {0}")]
    BoundarySample(usize),

    #[error("unsupported dimensions n={n}, k={k}")]
    UnsupportedDims { n: usize, k: usize },

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate surface: {0}")]
    Degenerate(String),

    #[error("density ratio undefined before initial time (requested {requested}, track starts at {start})")]
    BeforeInitialTime { requested: f64, start: f64 },

    #[error("time {0} lies after the end of the track")]
    AfterFinalTime(f64),

    #[error("step size {dt} violates explicit bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    #[error("gradient blow-up |Du| = {grad} at t = {time}")]
    GradientBlowUp { grad: f64, time: f64 },

    #[error("no surface in ball")]
    NoSurfaceInBall,

    #[error("slope blow-up before L: reached x = {max_x}")]
    SlopeBlowUp { max_x: f64 },

    #[error("no graphical expander in bracket")]
    NoExpanderInBracket,

    #[error("scaled family is not Hausdorff-Cauchy: {0}")]
    NotCauchy(String),

    #[error("too few samples above the resolution floor: {survivors} of {total}")]
    ResolutionFloor { survivors: usize, total: usize },

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("{0}")]
    Parse(#[from] crate::spec::ParseError),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
