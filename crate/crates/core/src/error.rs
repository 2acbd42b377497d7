use thiserror::Error;

pub type Result<T, E = NavError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NavError {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pursuer has exhausted its range (s = {traveled}, R = {range})")]
    ExpiredPursuer { traveled: f64, range: f64 },

    #[error("infeasible: {0}")]
    Infeasible(&'static str),

    #[error("contract violation: {0}")]
    Contract(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical divergence at t = {t}: {detail}")]
    NumericalDivergence { t: f64, detail: String },
}
