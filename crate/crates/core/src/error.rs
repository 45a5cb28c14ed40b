use thiserror::Error;

/// Errors raised by the model, integrator and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-generic costs: |{name} - cD| = {gap:e} does not exceed {tol:e}")]
    NonGeneric {
        name: &'static str,
        gap: f64,
        tol: f64,
    },

    #[error("integration blowup at t = {t}: coordinate {coordinate} = {value:e}")]
    Blowup {
        t: f64,
        coordinate: &'static str,
        value: f64,
    },

    #[error("y1 = {y1} outside the family range: violates {bound} = {limit}")]
    Range {
        y1: f64,
        bound: &'static str,
        limit: f64,
    },

    #[error("not an equilibrium: residual {0:e}")]
    NotEquilibrium(f64),

    #[error("eigenvalue iteration did not converge")]
    Numeric,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
