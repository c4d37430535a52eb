//! Concave piece-rate payment schedules.
//!
//! Cumulative pay for `y` completed blocks is
//!
//! ```text
//! P(y) = pbar * (1 - exp(-k * y)) + show_up_fee * 1{y >= 1},    k = ln 2 / half_life
//! ```
//!
//! so earnings approach `pbar` asymptotically and reach `pbar / 2` exactly at
//! the half-life. Marginal payments `p(y) = P(y) - P(y-1)` decline geometrically,
//! which makes the offered piece rate fall as a worker produces more.

use crate::error::{Error, Result};

/// A concave payment schedule with an output cap.
///
/// Immutable after construction; all methods are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct PaymentSchedule {
    pbar: f64,
    half_life: f64,
    cap: u32,
    show_up_fee: f64,
}

/// Default output cap, in blocks.
pub const DEFAULT_CAP: u32 = 200;

impl PaymentSchedule {
    /// Builds a schedule from its asymptotic maximum `pbar` (cents), the
    /// `half_life` (blocks at which cumulative pay reaches `pbar / 2`), an
    /// output `cap` (blocks), and a `show_up_fee` (cents) folded into the
    /// first unit's payment.
    pub fn new(pbar: f64, half_life: f64, cap: u32, show_up_fee: f64) -> Result<Self> {
        if !pbar.is_finite() || pbar <= 0.0 {
            return Err(Error::invalid(
                "pbar",
                format!("must be positive, got {pbar}"),
            ));
        }
        if !half_life.is_finite() || half_life <= 0.0 {
            return Err(Error::invalid(
                "half_life",
                format!("must be positive, got {half_life}"),
            ));
        }
        if cap < 1 {
            return Err(Error::invalid("cap", "must be at least 1"));
        }
        if !show_up_fee.is_finite() || show_up_fee < 0.0 {
            return Err(Error::invalid(
                "show_up_fee",
                format!("must be non-negative, got {show_up_fee}"),
            ));
        }
        Ok(Self {
            pbar,
            half_life,
            cap,
            show_up_fee,
        })
    }

    /// Asymptotic maximum earnings, cents.
    pub fn pbar(&self) -> f64 {
        self.pbar
    }

    /// Half-life of the schedule, blocks.
    pub fn half_life(&self) -> f64 {
        self.half_life
    }

    /// Decay rate `k = ln 2 / half_life`, per block.
    pub fn k(&self) -> f64 {
        std::f64::consts::LN_2 / self.half_life
    }

    /// Maximum output, blocks.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Fixed fee paid with the first unit, cents.
    pub fn show_up_fee(&self) -> f64 {
        self.show_up_fee
    }

    // Base-2 form of the decay keeps P(y) exact at integer multiples of the
    // half-life (e.g. P(half_life) = pbar / 2 with no rounding residue).
    fn raw(&self, y: f64) -> f64 {
        self.pbar * (1.0 - (-y / self.half_life).exp2())
    }

    /// Cumulative payment for `y` blocks, cents. Errors if `y > cap`.
    pub fn total_payment(&self, y: u32) -> Result<f64> {
        if y > self.cap {
            return Err(Error::OutputOutOfRange {
                y: y as i64,
                lo: 0,
                hi: self.cap,
            });
        }
        let fee = if y >= 1 { self.show_up_fee } else { 0.0 };
        Ok(self.raw(y as f64) + fee)
    }

    // p(y) = P(y) − P(y−1) in the product form
    // pbar · 2^{−(y−1)/hl} · (1 − 2^{−1/hl}), which avoids the catastrophic
    // cancellation of subtracting two near-equal cumulative payments deep in
    // the tail and makes the marginal scale exactly with pbar.
    fn raw_marginal(&self, y: f64) -> f64 {
        let step = 1.0 - (-1.0 / self.half_life).exp2();
        self.pbar * (-(y - 1.0) / self.half_life).exp2() * step
    }

    /// Marginal payment of the `y`-th block, `p(y) = P(y) - P(y-1)`, cents.
    /// The show-up fee is part of `p(1)`. Errors if `y` is outside `[1, cap]`.
    pub fn marginal_payment(&self, y: u32) -> Result<f64> {
        if y < 1 || y > self.cap {
            return Err(Error::OutputOutOfRange {
                y: y as i64,
                lo: 1,
                hi: self.cap,
            });
        }
        let fee = if y == 1 { self.show_up_fee } else { 0.0 };
        Ok(self.raw_marginal(y as f64) + fee)
    }

    /// Marginal payment of the `y`-th block evaluated from the payment formula
    /// with the cap ignored. Used to extrapolate `p(cap + 1)` when bracketing
    /// the reservation wage of a worker who hit the cap. Errors if `y < 1`.
    pub fn marginal_extrapolated(&self, y: u32) -> Result<f64> {
        if y < 1 {
            return Err(Error::OutputOutOfRange {
                y: y as i64,
                lo: 1,
                hi: u32::MAX,
            });
        }
        let fee = if y == 1 { self.show_up_fee } else { 0.0 };
        Ok(self.raw_marginal(y as f64) + fee)
    }

    /// A schedule paying `gamma` times this one at every output level
    /// (the show-up fee scales too). Errors if `gamma <= 0`.
    pub fn scale(&self, gamma: f64) -> Result<PaymentSchedule> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::invalid(
                "gamma",
                format!("must be positive, got {gamma}"),
            ));
        }
        PaymentSchedule::new(
            self.pbar * gamma,
            self.half_life,
            self.cap,
            self.show_up_fee * gamma,
        )
    }
}

/// Earnings split into whole cents and the fractional remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentSplit {
    /// Whole cents, `floor(earnings)`.
    pub whole: u64,
    /// Fractional remainder in `[0, 1)`; `whole + frac` equals the input exactly.
    pub frac: f64,
}

/// Splits non-negative `earnings` (cents) into whole cents and fraction.
pub fn split_cents(earnings: f64) -> Result<CentSplit> {
    if !earnings.is_finite() || earnings < 0.0 {
        return Err(Error::invalid(
            "earnings",
            format!("must be non-negative, got {earnings}"),
        ));
    }
    let whole = earnings.floor();
    Ok(CentSplit {
        whole: whole as u64,
        frac: earnings - whole,
    })
}

/// Rounds fractional-cent earnings to an integer payout that is correct in
/// expectation: pays `whole + 1` with probability `frac`, else `whole`.
/// `draw` must lie in `[0, 1)`.
pub fn stochastic_payout(earnings: f64, draw: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&draw) {
        return Err(Error::invalid(
            "draw",
            format!("must lie in [0, 1), got {draw}"),
        ));
    }
    let split = split_cents(earnings)?;
    Ok(if draw < split.frac {
        split.whole + 1
    } else {
        split.whole
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sched(pbar: f64, half_life: f64) -> PaymentSchedule {
        PaymentSchedule::new(pbar, half_life, DEFAULT_CAP, 0.0).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(PaymentSchedule::new(0.0, 10.0, 200, 0.0).is_err());
        assert!(PaymentSchedule::new(-1.0, 10.0, 200, 0.0).is_err());
        assert!(PaymentSchedule::new(10.0, 0.0, 200, 0.0).is_err());
        assert!(PaymentSchedule::new(10.0, 10.0, 0, 0.0).is_err());
        assert!(PaymentSchedule::new(10.0, 10.0, 200, -0.1).is_err());
        assert!(PaymentSchedule::new(f64::NAN, 10.0, 200, 0.0).is_err());
    }

    #[test]
    fn half_life_hits_half_of_pbar_exactly() {
        let s = sched(10.0, 10.0);
        assert!((s.k() - 0.0693147).abs() < 1e-6);
        assert_eq!(s.total_payment(10).unwrap(), 5.0);
        let s3 = sched(30.0, 10.0);
        assert_eq!(s3.total_payment(10).unwrap(), 15.0);
    }

    #[test]
    fn sample_earnings_table() {
        // Normalized cumulative and marginal payments for a 10-block half-life.
        let s = sched(10.0, 10.0);
        let p = |y: u32| s.total_payment(y).unwrap();
        let m = |y: u32| s.marginal_payment(y).unwrap();
        assert!((p(1) - 0.6697).abs() < 5e-4);
        assert!((p(1) / 10.0 - 0.07).abs() < 0.005);
        assert!((p(25) - 8.232).abs() < 5e-4);
        assert!((p(25) / 10.0 - 0.82).abs() < 0.005);
        assert!((m(2) - 0.625).abs() < 5e-4);
        assert!((m(26) - 0.118).abs() < 5e-4);
        assert_eq!(p(0), 0.0);
    }

    #[test]
    fn marginal_equals_total_for_first_unit_without_fee() {
        let s = sched(10.0, 10.0);
        assert_eq!(s.marginal_payment(1).unwrap(), s.total_payment(1).unwrap());
    }

    #[test]
    fn show_up_fee_is_folded_into_first_unit() {
        let s = PaymentSchedule::new(10.0, 10.0, 200, 2.5).unwrap();
        let bare = sched(10.0, 10.0);
        assert_eq!(s.total_payment(0).unwrap(), 0.0);
        assert!(
            (s.marginal_payment(1).unwrap() - (bare.marginal_payment(1).unwrap() + 2.5)).abs()
                < 1e-12
        );
        assert!((s.marginal_payment(2).unwrap() - bare.marginal_payment(2).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_output() {
        let s = sched(10.0, 10.0);
        assert!(s.total_payment(201).is_err());
        assert!(s.marginal_payment(0).is_err());
        assert!(s.marginal_payment(201).is_err());
        assert!(s.marginal_extrapolated(201).is_ok());
        assert!(s.marginal_extrapolated(0).is_err());
    }

    #[test]
    fn monotone_and_strictly_concave() {
        for s in [
            sched(10.0, 10.0),
            sched(30.0, 10.0),
            sched(7.3, 4.5),
            PaymentSchedule::new(10.0, 10.0, 200, 1.0).unwrap(),
        ] {
            for y in 0..s.cap() {
                assert!(s.total_payment(y + 1).unwrap() > s.total_payment(y).unwrap());
            }
            for y in 1..s.cap() {
                assert!(s.marginal_payment(y + 1).unwrap() < s.marginal_payment(y).unwrap());
            }
            assert!(s.total_payment(s.cap()).unwrap() < s.pbar() + s.show_up_fee());
        }
    }

    #[test]
    fn marginals_telescope() {
        let s = PaymentSchedule::new(23.0, 7.0, 200, 1.25).unwrap();
        let mut acc = s.total_payment(0).unwrap();
        for y in 1..=s.cap() {
            acc += s.marginal_payment(y).unwrap();
            assert!((acc - s.total_payment(y).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn half_life_identity_at_multiples() {
        let s = sched(10.0, 10.0);
        for n in 1..=3u32 {
            let expected = 1.0 - (2.0f64).powi(-(n as i32));
            assert!((s.total_payment(10 * n).unwrap() / 10.0 - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn scaling_commutes_with_payment() {
        let s = PaymentSchedule::new(10.0, 10.0, 200, 0.5).unwrap();
        let g = s.scale(3.0).unwrap();
        for y in 0..=s.cap() {
            let a = g.total_payment(y).unwrap();
            let b = 3.0 * s.total_payment(y).unwrap();
            if b == 0.0 {
                assert_eq!(a, 0.0);
            } else {
                assert!(((a - b) / b).abs() < 1e-12);
            }
        }
        assert_eq!(
            g.total_payment(10).unwrap(),
            3.0 * s.total_payment(10).unwrap()
        );
        assert!(s.scale(0.0).is_err());
        assert!(s.scale(-2.0).is_err());
        // Identity scaling returns identical payments.
        let id = s.scale(1.0).unwrap();
        for y in 0..=s.cap() {
            assert_eq!(id.total_payment(y).unwrap(), s.total_payment(y).unwrap());
        }
        // Halving the 10-cent schedule pays 2.5 cents at the half-life.
        let half = sched(10.0, 10.0).scale(0.5).unwrap();
        assert_eq!(half.total_payment(10).unwrap(), 2.5);
    }

    #[test]
    fn split_cents_examples() {
        let s = split_cents(7.3).unwrap();
        assert_eq!(s.whole, 7);
        assert!((s.frac - 0.3).abs() < 1e-12);
        assert_eq!(s.whole as f64 + s.frac, 7.3);

        let s = split_cents(5.0).unwrap();
        assert_eq!((s.whole, s.frac), (5, 0.0));

        // P(10) on the 30-cent schedule is exactly 15.0.
        let e = sched(30.0, 10.0).total_payment(10).unwrap();
        let s = split_cents(e).unwrap();
        assert_eq!((s.whole, s.frac), (15, 0.0));

        assert!(split_cents(-0.01).is_err());
    }

    #[test]
    fn stochastic_payout_examples() {
        assert_eq!(stochastic_payout(7.3, 0.5).unwrap(), 7);
        assert_eq!(stochastic_payout(7.3, 0.2).unwrap(), 8);
        for draw in [0.0, 0.3, 0.9999] {
            assert_eq!(stochastic_payout(7.0, draw).unwrap(), 7);
        }
        assert!(stochastic_payout(7.3, 1.0).is_err());
        assert!(stochastic_payout(7.3, -0.1).is_err());
    }

    #[test]
    fn stochastic_payout_is_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(12345);
        let n = 1_000_000u64;
        let mut sum = 0u64;
        for _ in 0..n {
            sum += stochastic_payout(7.3, rng.random::<f64>()).unwrap();
        }
        let mean = sum as f64 / n as f64;
        // Sample mean within three standard errors of 7.3 (and the coarser 0.01 band).
        let se = (0.3f64 * 0.7 / n as f64).sqrt();
        assert!((mean - 7.3).abs() < 3.0 * se, "mean = {mean}");
        assert!((mean - 7.3).abs() < 0.01);
    }
}
