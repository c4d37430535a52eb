//! Labor-supply toolkit for paid crowdsourcing experiments with concave
//! piece-rate payment schedules.
//!
//! The crate models workers paid a cumulative amount `P(y) = P̄·(1 − e^{−ky})`
//! for `y` completed blocks, parameterized by the half-life at which half of
//! `P̄` is earned. It provides:
//!
//! - [`schedule`]: payment schedules with exact cent splitting and
//!   stochastic whole-cent payout;
//! - [`agents`]: rational, quadratic-cost, and target-earning worker
//!   decision rules;
//! - [`estimation`]: reservation-wage imputation from observed stopping
//!   points, with bracket bounds and cap censoring;
//! - [`calibration`]: log-normal wage-distribution fitting, supply curves,
//!   and participation elasticities;
//! - [`focal`]: the whole-cent divisibility (focal-point) test with an exact
//!   binomial upper tail;
//! - [`stats`]: the numeric kernel — normal CDF/PDF via a rational erf
//!   approximation, OLS with heteroskedasticity-robust standard errors,
//!   Gaussian KDE, geometric means;
//! - [`sim`]: a seeded synthetic-experiment generator with independent
//!   per-worker RNG substreams;
//! - [`analysis`]: the one-stop pipeline producing regressions, calibration,
//!   focal tests, and figure-ready series from session records;
//! - [`io`]: CSV/JSON readers and writers with strict header and field
//!   validation.
//!
//! # Example
//!
//! ```
//! use piecework::{PaymentSchedule, WorkerProfile, rational_output, impute_wage};
//!
//! // 30-cent schedule, half the money in the first 10 blocks, cap at 200.
//! let schedule = PaymentSchedule::new(30.0, 10.0, 200, 0.0)?;
//! assert_eq!(schedule.total_payment(10)?, 15.0);
//!
//! // A worker valuing time at 0.05 cents/second with 6-second blocks works
//! // until the marginal wage falls below the reservation wage...
//! let worker = WorkerProfile::rational(0.05, 6.0);
//! let choice = rational_output(&schedule, &worker)?;
//!
//! // ...and the econometrician brackets the wage back from the stopping
//! // point alone.
//! let estimate = impute_wage(&schedule, choice.y, 6.0)?;
//! assert!(estimate.lower_usd_per_hour() < 0.05 * 36.0);
//! assert!(0.05 * 36.0 <= estimate.upper_usd_per_hour());
//! # Ok::<(), piecework::Error>(())
//! ```

pub mod agents;
pub mod analysis;
pub mod calibration;
pub mod error;
pub mod estimation;
pub mod focal;
pub mod io;
pub mod schedule;
pub mod sim;
pub mod stats;

pub use agents::{
    brute_force_output, quadratic_cost_output, rational_output, target_output, OutputChoice,
    StopReason, WorkerKind, WorkerProfile,
};
pub use analysis::{
    analyze, emit_series, AnalysisReport, AnalyzeOptions, Regressions, WorkerEstimate,
};
pub use calibration::{
    empirical_quantiles, fit_lognormal, point_elasticity, supply_curve, supply_fraction,
    CalibrationResult, Quantile,
};
pub use error::{Error, Result};
pub use estimation::{dollars_per_hour, impute_wage, WageEstimate};
pub use focal::{
    binom_upper_tail, divisible_fraction, focal_point_test, realizable_whole_cents, FocalOptions,
    FocalTestResult, PwMode,
};
pub use io::{
    read_estimates, read_records, write_estimates, write_json, write_records, EstimateRow,
};
pub use schedule::{split_cents, stochastic_payout, CentSplit, PaymentSchedule, DEFAULT_CAP};
pub use sim::{
    default_target_weights, simulate_experiment, GroupConfig, PopulationConfig, ScheduleConfig,
    SessionRecord,
};
pub use stats::{
    erf, erfc, geometric_mean, kde, ols_robust, silverman_bandwidth, std_normal_cdf,
    std_normal_pdf, HcVariant, RegressionFit,
};
