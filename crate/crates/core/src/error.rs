use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{what} = {value} is outside its admissible range")]
    Domain { what: &'static str, value: f64 },
    #[error("singular state: r = {r} (vehicle reached the obstacle center)")]
    Singularity { r: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("degenerate boundary slope at xi = {xi}, beta = {beta}: |dL/dbeta| = {d_beta}")]
    DegenerateSlope { xi: f64, beta: f64, d_beta: f64 },
    #[error("certificate is not verified")]
    NotVerified,
    #[error("boundary trace failed at xi = {xi}: {reason}")]
    Trace { xi: f64, reason: String },
    #[error("synthesis failed: margin {margin} <= 0 with {k_tangents} tangents")]
    Synthesis { margin: f64, k_tangents: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
