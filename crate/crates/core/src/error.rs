use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("digit {digit} is too large to materialize cylinder endpoints; use log_cylinder_diameter instead")]
    Overflow { digit: u64 },

    #[error("value overflows the double range even at log-log scale: {0}")]
    ScaleOverflow(String),

    #[error("point {x} lies on a cylinder boundary at depth {depth}; it has two symbolic expansions")]
    Ambiguous { x: f64, depth: usize },

    #[error("no construction covers this case: {0}")]
    UncoveredCase(String),

    #[error("construction failed: {reason} (witness k = {witness})")]
    Construction { reason: String, witness: u64 },

    #[error("degenerate alphabet: {0}")]
    DegenerateAlphabet(String),

    #[error("enumeration would visit about {estimate:.3e} nodes, above the cap of {cap:.3e}")]
    SizeCap { estimate: f64, cap: f64 },

    #[error("no sign change on [{lo}, {hi}]: log sums {f_lo} and {f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("validity window undefined: {0}")]
    WindowUndefined(String),

    #[error("series diverges: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
