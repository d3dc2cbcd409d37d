use thiserror::Error;

/// Errors raised by evaluations, scans and report generation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re}{im:+}i lies outside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("point with squared norm {norm_sqr} lies outside the open unit ball")]
    OutsideBall { norm_sqr: f64 },

    #[error("{what} = {value} is outside its admissible range {range}")]
    Domain {
        what: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{0} requires Taylor coefficient access, which a closed-form disk function does not provide")]
    Unsupported(&'static str),

    #[error("log-magnitude {log_abs} exceeds the plain evaluation limit {limit}; use log-domain evaluation")]
    Overflow { log_abs: f64, limit: f64 },

    #[error("growth bound applies to S0 maps only; this shear has no starlike certificate (margin {margin})")]
    NotCertified { margin: f64 },

    #[error("series spec: {0}")]
    Parse(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
