use thiserror::Error;

/// Everything that can go wrong inside the lab.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("radius {r} is not outside the horizon 2M = {horizon}")]
    Domain { r: f64, horizon: f64 },
    #[error("mass must be positive, got {0}")]
    Mass(f64),
    #[error("invalid mode (s = {s}, l = {l}): {reason}")]
    Mode { s: u32, l: u32, reason: &'static str },
    #[error("section is not regular at the poles for spin {s} (tail fraction {tail:.3e})")]
    Regularity { s: u32, tail: f64 },
    #[error("time step {dt} exceeds CFL limit {limit} for spacing {h}")]
    Cfl { dt: f64, h: f64, limit: f64 },
    #[error("signal reached the {side} grid boundary at t = {t:.3}")]
    BoundaryContact { t: f64, side: &'static str },
    #[error("initial data support [{lo:.3}, {hi:.3}] too close to grid ends [{min:.3}, {max:.3}]")]
    Support { lo: f64, hi: f64, min: f64, max: f64 },
    #[error("slice is not spacelike: |h'| = {slope} at r* = {r_star}")]
    NotSpacelike { r_star: f64, slope: f64 },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("beta_1 is not asymptotically flat: |C2| = {c2:.3e} exceeds tolerance {tol:.3e}")]
    NotAsymptoticallyFlat { c2: f64, tol: f64 },
    #[error("snapshots too sparse: {0}")]
    Sparse(String),
    #[error("{what} does not converge on the window: outer tail carries {tail:.3e} of the total")]
    Divergent { what: &'static str, tail: f64 },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
