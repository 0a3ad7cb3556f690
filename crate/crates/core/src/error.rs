use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VhpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("CFL violation: dt = {dt} exceeds bound {bound}")]
    Cfl { dt: f64, bound: f64 },
    #[error("quadrature did not reach tolerance (achieved {achieved:e})")]
    Quadrature { achieved: f64 },
    #[error("wall-normal trace of u2 is {0:e}, extension requires 0")]
    WallTrace(f64),
    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("NaN detected at t = {t} (step {step})")]
    Blowup { t: f64, step: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VhpError>;
