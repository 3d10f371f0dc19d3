use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("divergent integral: {0}")]
    Divergent(&'static str),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("negative radicand in Delta_2 at b = {b:e}")]
    Radicand { b: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("free energy not defined: {0}")]
    Undefined(String),

    #[error("internal solver failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
