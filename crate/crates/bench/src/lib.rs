//! Fixtures shared by the estimator benchmarks.

use birkhoff_core::counting::{TupleConstraint, TupleShape};
use birkhoff_core::{theorem_schedule, DigitSchedule, EpsilonPolicy, GrowthRate, IfsSystem, Potential, ScheduleCase};

pub fn affine() -> IfsSystem {
    IfsSystem::affine_power_law(2.0).expect("d = 2 is valid")
}

/// `s_n = 10·2^n`, `t_n = s_n/2`.
pub fn geometric() -> DigitSchedule {
    DigitSchedule::geometric(10.0, 2.0).expect("valid geometric schedule")
}

/// Upper-bound schedule for `φ(j) = j`, `Φ(n) = e^{2^n}` with `ε = 0.1`.
pub fn t1_ii() -> DigitSchedule {
    theorem_schedule(
        &Potential::power_law(1.0).expect("a = 1"),
        &GrowthRate::super_exp(2.0).expect("beta = 2"),
        ScheduleCase::T1II,
        EpsilonPolicy::Fixed(0.1),
    )
    .expect("covered case")
}

/// A mid-sized window from the counting grid: `Σ i_k ∈ [m, m + mε)`.
pub fn tuple_window(m: f64, n: usize) -> TupleConstraint {
    TupleConstraint::new(m, n, TupleShape::PowerLaw { a: 1.0 }, 0.25).expect("valid window")
}
