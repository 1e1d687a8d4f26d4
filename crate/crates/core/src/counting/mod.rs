//! Tuple sets with a prescribed sum of potential values, their weighted sums
//! `G` and `Ĝ`, and the explicit upper bounds those sums satisfy.

pub mod bounds;
pub mod enumerate;
pub mod grid;
pub mod zeta;

pub use bounds::{g_bound, g_bound_log, ghat_bound, BoundConstants, BoundReport};
pub use enumerate::{
    count_tuples, enumerate_tuples, for_each_tuple, g_sum, ghat_sum, Enumeration, EnumerationMethod,
    IntegerSumTable, DEFAULT_NODE_CAP,
};
pub use grid::{verify_counting_grid, GridReport, GridRow, Lemma};
pub use zeta::{zeta_normalizer, zeta_truncated, ZetaEstimate, NORMALIZER_TOL};

use crate::error::{domain, Result};

/// The per-coordinate term whose sum is constrained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TupleShape {
    /// `i^a`
    PowerLaw { a: f64 },
    /// `e^{(log i)^b}`
    LogPower { b: f64 },
}

impl TupleShape {
    pub fn term(&self, i: u64) -> f64 {
        let x = i as f64;
        match *self {
            Self::PowerLaw { a } => x.powf(a),
            Self::LogPower { b } => x.ln().powf(b).exp(),
        }
    }

    /// The exponent `a` when it is a small positive integer, so that every
    /// term is an exact integer.
    pub fn integer_exponent(&self) -> Option<u32> {
        match *self {
            Self::PowerLaw { a } if a.fract() == 0.0 && (1.0..=16.0).contains(&a) => Some(a as u32),
            _ => None,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Self::PowerLaw { a } => a,
            Self::LogPower { b } => b,
        }
    }
}

/// Whether the right end of the sum window is included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowKind {
    /// `[m, m + mε)`
    #[default]
    HalfOpen,
    /// `[m, m + mε]`
    Closed,
}

/// Ordered `n`-tuples of positive integers whose terms sum into the window
/// starting at `m` with relative width `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleConstraint {
    pub m: f64,
    pub n: usize,
    pub shape: TupleShape,
    pub eps: f64,
    pub window: WindowKind,
}

impl TupleConstraint {
    pub fn new(m: f64, n: usize, shape: TupleShape, eps: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return domain(format!("m must be positive, got {m}"));
        }
        if n == 0 {
            return domain("tuple length n must be ≥ 1");
        }
        if !(eps > 0.0 && eps < 1.0) {
            return domain(format!("ε must lie in (0, 1), got {eps}"));
        }
        match shape {
            TupleShape::PowerLaw { a } if !(a > 0.0 && a.is_finite()) => {
                return domain(format!("a must be > 0, got {a}"))
            }
            TupleShape::LogPower { b } if !(b > 1.0 && b.is_finite()) => {
                return domain(format!("b must be > 1, got {b}"))
            }
            _ => {}
        }
        Ok(Self { m, n, shape, eps, window: WindowKind::HalfOpen })
    }

    pub fn closed(mut self) -> Self {
        self.window = WindowKind::Closed;
        self
    }

    /// Right end `m + mε` of the window.
    pub fn upper(&self) -> f64 {
        self.m + self.m * self.eps
    }

    pub fn contains(&self, sum: f64) -> bool {
        sum >= self.m
            && match self.window {
                WindowKind::HalfOpen => sum < self.upper(),
                WindowKind::Closed => sum <= self.upper(),
            }
    }
}
