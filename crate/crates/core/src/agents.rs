//! Behavioral worker models: a rational worker who weighs the marginal
//! payment of the next block against the opportunity cost of the time it
//! takes, a variant with an additional quadratic effort cost, and a target
//! earner who works until cumulative earnings hit a self-imposed goal.

use crate::error::{Error, Result};
use crate::schedule::PaymentSchedule;

/// Behavioral type of a worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkerKind {
    /// Compares marginal wage to the reservation wage.
    Rational,
    /// Works until cumulative whole-cent earnings reach a target.
    TargetEarner,
}

/// Behavioral parameters of one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerProfile {
    /// Reservation wage, cents per second.
    pub omega: f64,
    /// Expected time per block, seconds.
    pub block_time: f64,
    /// Behavioral type.
    pub kind: WorkerKind,
    /// Quadratic effort-cost coefficient (cents); adds `nu * (y - 1)^2` to the
    /// cost of producing `y >= 1` blocks.
    pub nu: f64,
    /// Earnings target in whole cents; required for a target earner.
    pub target: Option<u64>,
    /// Minimum marginal wage (cents per second) a target earner tolerates
    /// while chasing an unattained target; 0 means they grind to the cap.
    pub wage_floor: f64,
}

impl WorkerProfile {
    /// A rational worker with reservation wage `omega` (cents/second) and
    /// per-block time `block_time` (seconds).
    pub fn rational(omega: f64, block_time: f64) -> Self {
        Self {
            omega,
            block_time,
            kind: WorkerKind::Rational,
            nu: 0.0,
            target: None,
            wage_floor: 0.0,
        }
    }

    /// A target earner aiming for `target` whole cents.
    pub fn target_earner(target: u64, block_time: f64) -> Self {
        Self {
            omega: 0.0,
            block_time,
            kind: WorkerKind::TargetEarner,
            nu: 0.0,
            target: Some(target),
            wage_floor: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("omega", self.omega),
            ("block_time", self.block_time),
            ("nu", self.nu),
            ("wage_floor", self.wage_floor),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and non-negative, got {v}"),
                ));
            }
        }
        if self.block_time <= 0.0 {
            return Err(Error::invalid("block_time", "must be positive".to_string()));
        }
        if self.kind == WorkerKind::TargetEarner && self.target.is_none() {
            return Err(Error::invalid(
                "target",
                "target earner needs a target".to_string(),
            ));
        }
        Ok(())
    }
}

/// Why a worker stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The next block's marginal wage fell below the reservation wage
    /// (or, with a quadratic cost, below the full marginal cost).
    WageBelowReservation,
    /// Cumulative whole-cent earnings reached the target.
    TargetReached,
    /// The target cannot be attained; the worker quit (or ground to the cap).
    TargetUnreachable,
    /// Output hit the schedule's cap.
    CapReached,
    /// Even the first block paid below the reservation wage.
    NeverStarted,
}

/// A worker's chosen output and resulting earnings.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputChoice {
    /// Blocks completed.
    pub y: u32,
    /// Cumulative earnings at `y`, cents.
    pub earnings: f64,
    /// Why the worker stopped at `y`.
    pub stop_reason: StopReason,
}

fn choice(s: &PaymentSchedule, y: u32, stop_reason: StopReason) -> Result<OutputChoice> {
    Ok(OutputChoice {
        y,
        earnings: s.total_payment(y)?,
        stop_reason,
    })
}

/// Output of a rational worker: the largest `y` whose every block pays a
/// marginal wage of at least `omega` (ties resolve toward working). Requires
/// a [`WorkerKind::Rational`] profile with `nu == 0`.
pub fn rational_output(s: &PaymentSchedule, w: &WorkerProfile) -> Result<OutputChoice> {
    w.validate()?;
    if w.kind != WorkerKind::Rational {
        return Err(Error::WrongWorkerKind {
            op: "rational_output",
            expected: "Rational",
        });
    }
    if w.nu != 0.0 {
        return Err(Error::invalid(
            "nu",
            "rational_output assumes nu = 0; use quadratic_cost_output".to_string(),
        ));
    }
    let mut y = 0u32;
    while y < s.cap() {
        let p = s.marginal_payment(y + 1)?;
        if p / w.block_time >= w.omega {
            y += 1;
        } else {
            break;
        }
    }
    let reason = if y == s.cap() {
        StopReason::CapReached
    } else if y == 0 {
        StopReason::NeverStarted
    } else {
        StopReason::WageBelowReservation
    };
    choice(s, y, reason)
}

/// Output of a rational worker with an additional quadratic effort cost:
/// the worker takes block `y` while its marginal payment covers
/// `omega * block_time + nu * (2y - 3)` (the forward difference of the
/// quadratic term; the first block carries no quadratic cost). With
/// `nu == 0` this reduces to [`rational_output`].
pub fn quadratic_cost_output(s: &PaymentSchedule, w: &WorkerProfile) -> Result<OutputChoice> {
    w.validate()?;
    if w.kind != WorkerKind::Rational {
        return Err(Error::WrongWorkerKind {
            op: "quadratic_cost_output",
            expected: "Rational",
        });
    }
    let mut y = 0u32;
    while y < s.cap() {
        let unit = y + 1;
        let quad = if unit >= 2 {
            w.nu * (2.0 * unit as f64 - 3.0)
        } else {
            0.0
        };
        let mc = w.omega * w.block_time + quad;
        if s.marginal_payment(unit)? >= mc {
            y += 1;
        } else {
            break;
        }
    }
    let reason = if y == s.cap() {
        StopReason::CapReached
    } else if y == 0 {
        StopReason::NeverStarted
    } else {
        StopReason::WageBelowReservation
    };
    choice(s, y, reason)
}

/// Exhaustive maximizer of `P(y) - omega * t * y - nu * (y - 1)^2` over
/// `y` in `[0, cap]` (the quadratic term applies for `y >= 1`). Returns the
/// smallest maximizing `y`. Used as a ground-truth oracle for the stopping
/// rules above.
pub fn brute_force_output(s: &PaymentSchedule, omega: f64, t: f64, nu: f64) -> Result<u32> {
    for (name, v) in [("omega", omega), ("t", t), ("nu", nu)] {
        if !v.is_finite() {
            return Err(Error::invalid(name, "must be finite".to_string()));
        }
    }
    if t <= 0.0 {
        return Err(Error::invalid("t", "must be positive".to_string()));
    }
    let mut best_y = 0u32;
    let mut best_u = 0.0f64; // U(0) = 0
    for y in 1..=s.cap() {
        let yf = y as f64;
        let u = s.total_payment(y)? - omega * t * yf - nu * (yf - 1.0) * (yf - 1.0);
        if u > best_u {
            best_u = u;
            best_y = y;
        }
    }
    Ok(best_y)
}

/// Output of a target earner: the minimal `y` whose whole-cent earnings
/// `floor(P(y))` reach the target. If the target is unattainable, the worker
/// keeps going while the next block's marginal wage stays at or above
/// `wage_floor`, then quits with [`StopReason::TargetUnreachable`] (with a
/// zero wage floor they grind to the cap).
pub fn target_output(s: &PaymentSchedule, w: &WorkerProfile) -> Result<OutputChoice> {
    w.validate()?;
    if w.kind != WorkerKind::TargetEarner {
        return Err(Error::WrongWorkerKind {
            op: "target_output",
            expected: "TargetEarner",
        });
    }
    let target = w.target.expect("validated");
    let mut y = 0u32;
    loop {
        let earned = s.total_payment(y)?;
        if earned.floor() as u64 >= target {
            return choice(s, y, StopReason::TargetReached);
        }
        if y == s.cap() {
            return choice(s, y, StopReason::TargetUnreachable);
        }
        if s.marginal_payment(y + 1)? / w.block_time < w.wage_floor {
            return choice(s, y, StopReason::TargetUnreachable);
        }
        y += 1;
    }
}
