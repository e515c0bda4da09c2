use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid bracket: f({lo}) = {f_lo} and f({hi}) = {f_hi} do not have strictly opposite signs")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("search failed: {0}")]
    SearchFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("bound inapplicable: {0}")]
    Inapplicable(String),
    #[error("bound is vacuous: {0}")]
    Vacuous(String),
    #[error("only asymptotics are available: {0}")]
    AsymptoticsOnly(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
