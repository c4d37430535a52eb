//! Focal-point test for earnings targeting.
//!
//! Under a proportionality null, a worker's whole-cent earnings are equally
//! likely to land on any realizable whole-cent value, so the number of
//! workers whose earnings are divisible by a focal modulus (5 cents by
//! default) is binomial with success probability `q` equal to the divisible
//! fraction of the realizable values. An excess of divisible earners is
//! evidence of round-number targeting; the test reports the exact binomial
//! upper-tail probability of the observed count.

use crate::error::{Error, Result};
use crate::schedule::PaymentSchedule;
use crate::stats::KahanSum;

/// How to enumerate realizable whole-cent values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PwMode {
    /// Deduplicated set of attainable whole-cent values (default).
    #[default]
    Set,
    /// One entry per output level, so values spanning many output levels
    /// carry proportionally more weight.
    Multiset,
}

/// Options for [`focal_point_test`].
#[derive(Debug, Clone, Default)]
pub struct FocalOptions {
    /// Enumeration mode for the realizable values.
    pub mode: PwMode,
    /// Highest output level to enumerate; defaults to the maximum observed.
    pub max_y: Option<u32>,
    /// Drop the terminal whole-cent value (the band where the schedule has
    /// flattened out) from the realizable set before computing `q`.
    pub exclude_terminal: bool,
}

/// Result of the focal-point test.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FocalTestResult {
    /// Workers whose whole-cent earnings are divisible by the modulus.
    pub s: u64,
    /// Workers tested (all with `y >= 1`).
    pub n: u64,
    /// Null success probability: divisible fraction of `realizable`.
    pub q: f64,
    /// Exact binomial upper tail `Pr(X >= s)` at `(n, q)`.
    pub p_value: f64,
    /// The realizable whole-cent values the null was computed from.
    pub realizable: Vec<u64>,
    /// The focal modulus.
    pub modulus: u32,
}

/// Whole-cent earnings values attainable at output levels `1..=max_y`.
/// `Set` deduplicates; `Multiset` keeps one entry per output level.
pub fn realizable_whole_cents(s: &PaymentSchedule, max_y: u32, mode: PwMode) -> Result<Vec<u64>> {
    if max_y < 1 || max_y > s.cap() {
        return Err(Error::invalid(
            "max_y",
            format!("must lie in [1, {}], got {max_y}", s.cap()),
        ));
    }
    let mut values: Vec<u64> = (1..=max_y)
        .map(|y| Ok(s.total_payment(y)?.floor() as u64))
        .collect::<Result<_>>()?;
    if mode == PwMode::Set {
        values.sort_unstable();
        values.dedup();
    }
    Ok(values)
}

/// Fraction of `values` divisible by `m`.
pub fn divisible_fraction(values: &[u64], m: u32) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("values", "empty list".to_string()));
    }
    if m < 1 {
        return Err(Error::invalid(
            "m",
            "modulus must be at least 1".to_string(),
        ));
    }
    let hits = values.iter().filter(|&&v| v % m as u64 == 0).count();
    Ok(hits as f64 / values.len() as f64)
}

/// Exact binomial upper tail `Pr(X >= s)` for `X ~ Binomial(n, q)`,
/// computed from a log-space starting term and the term-ratio recurrence
/// with compensated summation. Absolute error is well below 1e-10.
pub fn binom_upper_tail(n: u64, q: f64, s: u64) -> Result<f64> {
    if s > n {
        return Err(Error::invalid(
            "s",
            format!("successes {s} exceed trials {n}"),
        ));
    }
    if !q.is_finite() || q <= 0.0 || q >= 1.0 {
        return Err(Error::invalid(
            "q",
            format!("must lie strictly inside (0, 1), got {q}"),
        ));
    }
    if s == 0 {
        return Ok(1.0);
    }
    // ln C(n, s) = sum_{j=1..s} ln((n - s + j) / j)
    let mut ln_choose = KahanSum::new();
    for j in 1..=s {
        ln_choose.add(((n - s + j) as f64 / j as f64).ln());
    }
    let ln_term = ln_choose.value() + s as f64 * q.ln() + (n - s) as f64 * (-q).ln_1p();
    let mut term = ln_term.exp();
    let ratio = q / (1.0 - q);
    let mut acc = KahanSum::new();
    let mut j = s;
    loop {
        acc.add(term);
        if j == n || term == 0.0 {
            break;
        }
        term *= (n - j) as f64 / (j + 1) as f64 * ratio;
        j += 1;
    }
    Ok(acc.value().clamp(0.0, 1.0))
}

/// Runs the focal-point test on observed outputs (all must be `>= 1`):
/// counts workers whose whole-cent earnings are divisible by `m`, computes
/// the null probability `q` from the realizable whole-cent values up to the
/// maximum observed output (or `opts.max_y`), and reports the exact binomial
/// upper-tail p-value.
pub fn focal_point_test(
    outputs: &[u32],
    schedule: &PaymentSchedule,
    m: u32,
    opts: &FocalOptions,
) -> Result<FocalTestResult> {
    if outputs.is_empty() {
        return Err(Error::invalid("outputs", "empty list".to_string()));
    }
    if m < 1 {
        return Err(Error::invalid(
            "m",
            "modulus must be at least 1".to_string(),
        ));
    }
    if let Some(&bad) = outputs.iter().find(|&&y| y == 0) {
        return Err(Error::invalid(
            "outputs",
            format!("all outputs must be >= 1, got {bad}"),
        ));
    }
    let observed_max = *outputs.iter().max().expect("non-empty");
    if observed_max > schedule.cap() {
        return Err(Error::OutputOutOfRange {
            y: observed_max as i64,
            lo: 1,
            hi: schedule.cap(),
        });
    }
    let max_y = opts.max_y.unwrap_or(observed_max);
    let mut realizable = realizable_whole_cents(schedule, max_y, opts.mode)?;
    if opts.exclude_terminal {
        let terminal = schedule.total_payment(max_y)?.floor() as u64;
        realizable.retain(|&v| v != terminal);
        if realizable.is_empty() {
            return Err(Error::DegenerateData(
                "terminal-band exclusion emptied the realizable set".to_string(),
            ));
        }
    }
    let q = divisible_fraction(&realizable, m)?;
    let mut s = 0u64;
    for &y in outputs {
        let cents = schedule.total_payment(y)?.floor() as u64;
        if cents.is_multiple_of(m as u64) {
            s += 1;
        }
    }
    let n = outputs.len() as u64;
    // Boundary nulls: Pr(X >= 0) = 1 regardless of q, and q = 1 makes every
    // success count certain. q = 0 with observed successes means the
    // realizable set does not cover the data (a max_y override below the
    // observed maximum), which the binomial null cannot describe.
    let p_value = if s == 0 || q >= 1.0 {
        1.0
    } else if q <= 0.0 {
        return Err(Error::DegenerateData(format!(
            "observed {s} divisible earnings but the realizable set admits none \
             (q = 0); widen max_y"
        )));
    } else {
        binom_upper_tail(n, q, s)?
    };
    Ok(FocalTestResult {
        s,
        n,
        q,
        p_value,
        realizable,
        modulus: m,
    })
}
