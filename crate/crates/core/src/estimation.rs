//! Reservation-wage imputation from observed output choices.
//!
//! A worker who stopped at `y` revealed that block `y` was worth taking and
//! block `y + 1` was not, so their reservation wage lies in the bracket
//! `(p(y+1) / t_bar, p(y) / t_bar]`. The point estimate is the midpoint,
//! `omega_hat = (p(y) + p(y+1)) / (2 * t_bar)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::PaymentSchedule;

/// An imputed reservation wage with its identifying bracket.
/// All wage fields are in cents per second; use [`dollars_per_hour`] or
/// the view methods for the dollars-per-hour scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WageEstimate {
    /// Midpoint estimate, cents per second.
    pub omega_hat: f64,
    /// Exclusive lower bound `p(y+1) / t_bar`, cents per second.
    pub lower: f64,
    /// Inclusive upper bound `p(y) / t_bar`, cents per second.
    pub upper: f64,
    /// Observed output, blocks.
    pub y: u32,
    /// Mean block time, seconds.
    pub t_bar: f64,
    /// True when the worker hit the output cap, so `p(cap+1)` had to be
    /// extrapolated beyond the cap and only the upper bound is data-driven.
    pub censored: bool,
}

impl WageEstimate {
    /// Point estimate in dollars per hour.
    pub fn omega_usd_per_hour(&self) -> f64 {
        dollars_per_hour(self.omega_hat)
    }

    /// Lower bound in dollars per hour.
    pub fn lower_usd_per_hour(&self) -> f64 {
        dollars_per_hour(self.lower)
    }

    /// Upper bound in dollars per hour.
    pub fn upper_usd_per_hour(&self) -> f64 {
        dollars_per_hour(self.upper)
    }
}

/// Converts cents per second to dollars per hour (factor 36).
pub fn dollars_per_hour(omega_cents_per_second: f64) -> f64 {
    omega_cents_per_second * 3600.0 / 100.0
}

/// Imputes the reservation wage of a worker who produced `y` blocks with
/// mean block time `t_bar` seconds under schedule `s`.
///
/// The first block's marginal payment includes the show-up fee. A worker at
/// the cap gets `p(cap+1)` extrapolated from the payment formula and a
/// `censored` flag. Workers at `y = 0` are rejected: only the one-sided bound
/// `omega > p(1) / t_bar` is identified for them.
pub fn impute_wage(s: &PaymentSchedule, y: u32, t_bar: f64) -> Result<WageEstimate> {
    if y == 0 {
        return Err(Error::Unidentified(
            "y = 0 leaves only the bound omega > p(1)/t_bar".to_string(),
        ));
    }
    if y > s.cap() {
        return Err(Error::OutputOutOfRange {
            y: y as i64,
            lo: 1,
            hi: s.cap(),
        });
    }
    if !t_bar.is_finite() || t_bar <= 0.0 {
        return Err(Error::invalid(
            "t_bar",
            format!("must be positive, got {t_bar}"),
        ));
    }
    let p_y = s.marginal_payment(y)?;
    let censored = y == s.cap();
    let p_next = if censored {
        s.marginal_extrapolated(y + 1)?
    } else {
        s.marginal_payment(y + 1)?
    };
    Ok(WageEstimate {
        omega_hat: (p_y + p_next) / (2.0 * t_bar),
        lower: p_next / t_bar,
        upper: p_y / t_bar,
        y,
        t_bar,
        censored,
    })
}
