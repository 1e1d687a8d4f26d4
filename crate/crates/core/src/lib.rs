//! Growth rates of Birkhoff sums over d-decaying Gauss-like iterated
//! function systems: concrete systems, potentials and growth rates, digit
//! schedules, closed-form dimensions, counting oracles and covering-sum
//! dimension estimators.

pub mod counting;
pub mod covering;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod numeric;
pub mod potentials;
pub mod report;
pub mod schedules;

pub use covering::{covering_log_sum, dimension_root, CoverKind, CoverMethod, CoverReport, RootTrace};
pub use dimension::{
    classify_regime, closed_form_dimension, lem_a_liminf, moran_dimension, DimensionResult, LiminfEstimate,
    MoranBracket, Regime, RegimeTag,
};
pub use error::{Error, Result};
pub use ifs::{CylinderInterval, DiameterBounds, IfsSystem, SystemKind, Word};
pub use potentials::{GrowthRate, LogScaleValue, Potential, Scale};
pub use schedules::{theorem_schedule, DigitSchedule, DigitWindow, EpsilonPolicy, SamplePoint, ScheduleCase};
