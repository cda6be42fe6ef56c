//! Success distribution of a one-shot, two-phase access reservation protocol.
//!
//! `T` users each activate one of `M` reservation tokens. The base station
//! only sees which tokens are active (it cannot tell a single activator from
//! several), picks `min(active, K)` of them uniformly and grants each one of
//! the `K` data slots. A data slot carries a successful transmission only if
//! its token was activated by exactly one user.
//!
//! The crate computes the exact pmf of the number of successes `S_D`
//! ([`analysis`]), the success rate and efficiency built on it ([`metrics`]),
//! and a seeded Monte Carlo model of the same frame ([`simulator`]) used to
//! cross-check the closed form.

pub mod analysis;
pub mod combinatorics;
pub mod config;
pub mod format;
pub mod metrics;
pub mod simulator;

pub use analysis::{
    outcome_probability, success_pmf, success_pmf_float, success_pmf_with, ContentionOutcome,
    FloatPmf, PmfKind, SuccessPmf,
};
pub use combinatorics::{
    binomial, factorial, falling_factorial, hypergeometric_pmf, stirling2_assoc, BigCount,
    ExactProb, StirlingTable,
};
pub use config::SystemConfig;
pub use metrics::{
    efficiency, frame_metrics, optimal_data_slots, success_rate, sweep, FrameMetrics, OptimalSlots,
    Provenance, SweepAxis, SweepReport,
};
pub use simulator::{
    compare_to_exact, estimate_pmf, simulate_frame, Comparison, DetectionMode, EmpiricalReport,
    FrameStream, FrameTrace, SimParams,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("number of tokens M must be at least 1")]
    NoTokens,
    #[error("number of data slots K must be at least 1")]
    NoDataSlots,
    #[error("success rate is undefined for T = 0 users")]
    NoUsers,
    #[error("number of iterations N must be at least 1")]
    NoIterations,
    #[error("{singles} singles and {collisions} collisions exceed the {tokens} available tokens")]
    TooManyActiveTokens {
        singles: u32,
        collisions: u32,
        tokens: u32,
    },
    #[error("cannot draw {draws} items from a population of {population}")]
    TooManyDraws { draws: u32, population: u32 },
    #[error("empty range {start}..={end}")]
    EmptyRange { start: u32, end: u32 },
    #[error("stirling table covers n <= {max_n}, but n = {n} was requested")]
    TableTooSmall { max_n: u32, n: u32 },
    #[error("float path lost precision: ln P(S_D = {d}) = {log_mass} underflows f64")]
    PrecisionLoss { d: u32, log_mass: f64 },
    #[error("no analytic reference exists for ternary detection")]
    NoAnalyticReference,
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
