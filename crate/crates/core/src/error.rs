use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix determinant {det} is too far from 1 to renormalize")]
    Determinant { det: f64 },

    #[error("geodesic integration diverged: determinant drifted by {drift:e}")]
    SolverDivergence { drift: f64 },

    #[error("shooting did not converge; best upper bound on the distance is {best_upper}")]
    Nonconvergence { best_upper: f64 },

    #[error("ball enumeration budget exceeded: {count} candidates at radius {radius}")]
    Budget { count: usize, radius: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time change speed {value} outside the declared bounds [{min}, {max}]")]
    SpeedBounds { value: f64, min: f64, max: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
