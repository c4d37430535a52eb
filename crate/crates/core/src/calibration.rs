//! Log-normal calibration of the reservation-wage distribution, with the
//! implied labor-supply curve and its extensive-margin elasticity.
//!
//! Wages enter in dollars per hour. With log wages fitted as
//! `N(mu, sigma^2)`, the fraction of the population willing to work at wage
//! `w` is `Phi((ln w - mu) / sigma)`, and the point elasticity of that
//! supply fraction with respect to `w` is `phi(z) / (sigma * Phi(z))`.

use crate::error::{Error, Result};
use crate::stats::{quantile_sorted, std_normal_cdf, std_normal_pdf, KahanSum};

/// A fitted log-normal wage distribution plus empirical quantiles.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CalibrationResult {
    /// Mean of log wages (log dollars/hour).
    pub mu: f64,
    /// Sample standard deviation of log wages (divisor `n - 1`).
    pub sigma: f64,
    /// Sample size.
    pub n: usize,
    /// Empirical wage quantiles at the requested probabilities, dollars/hour.
    pub quantiles: Vec<Quantile>,
}

/// One empirical quantile of the wage sample.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Quantile {
    pub prob: f64,
    pub wage: f64,
}

fn validate_wages(wages: &[f64]) -> Result<()> {
    for &w in wages {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::invalid(
                "wages",
                format!("must be strictly positive, got {w}"),
            ));
        }
    }
    Ok(())
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(
                "probs",
                format!("must lie in [0, 1], got {p}"),
            ));
        }
    }
    Ok(())
}

/// Fits a log-normal distribution to strictly positive `wages`
/// (dollars/hour): `mu` is the mean of log wages and `sigma` their sample
/// standard deviation. Empirical quantiles are recorded at `probs`.
/// Errors on samples smaller than 2 or with zero log-variance.
pub fn fit_lognormal(wages: &[f64], probs: &[f64]) -> Result<CalibrationResult> {
    if wages.len() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 wages, got {}",
            wages.len()
        )));
    }
    validate_wages(wages)?;
    validate_probs(probs)?;
    let n = wages.len();
    let logs: Vec<f64> = wages.iter().map(|w| w.ln()).collect();
    let mut acc = KahanSum::new();
    for &l in &logs {
        acc.add(l);
    }
    let mu = acc.value() / n as f64;
    let mut ss = KahanSum::new();
    for &l in &logs {
        ss.add((l - mu) * (l - mu));
    }
    let sigma = (ss.value() / (n - 1) as f64).sqrt();
    if sigma <= 0.0 {
        return Err(Error::DegenerateData(
            "log wages have zero variance".to_string(),
        ));
    }
    let quantiles = empirical_quantiles(wages, probs)?
        .into_iter()
        .zip(probs)
        .map(|(wage, &prob)| Quantile { prob, wage })
        .collect();
    Ok(CalibrationResult {
        mu,
        sigma,
        n,
        quantiles,
    })
}

/// Fraction of the population accepting wage `w` under a fitted log-normal:
/// `Phi((ln w - mu) / sigma)`. Multiply by the population size for the
/// supply curve itself.
pub fn supply_fraction(mu: f64, sigma: f64, w: f64) -> Result<f64> {
    check_params(mu, sigma)?;
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::invalid("w", format!("must be positive, got {w}")));
    }
    Ok(std_normal_cdf((w.ln() - mu) / sigma))
}

/// Labor-supply curve `S(w) = n_s * Phi((ln w - mu) / sigma)`.
pub fn supply_curve(n_s: f64, mu: f64, sigma: f64, w: f64) -> Result<f64> {
    if !n_s.is_finite() || n_s < 0.0 {
        return Err(Error::invalid(
            "n_s",
            format!("must be non-negative, got {n_s}"),
        ));
    }
    Ok(n_s * supply_fraction(mu, sigma, w)?)
}

/// Point elasticity of the extensive-margin labor supply at wage `w`:
/// with `z = (ln w - mu) / sigma`, returns `phi(z) / (sigma * Phi(z))`,
/// i.e. `d ln S / d ln w`.
pub fn point_elasticity(mu: f64, sigma: f64, w: f64) -> Result<f64> {
    check_params(mu, sigma)?;
    if !w.is_finite() || w <= 0.0 {
        return Err(Error::invalid("w", format!("must be positive, got {w}")));
    }
    let z = (w.ln() - mu) / sigma;
    Ok(std_normal_pdf(z) / (sigma * std_normal_cdf(z)))
}

fn check_params(mu: f64, sigma: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::invalid("mu", "must be finite".to_string()));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::invalid(
            "sigma",
            format!("must be positive, got {sigma}"),
        ));
    }
    Ok(())
}

/// Order-statistic quantiles of `wages` at each probability in `probs`,
/// with linear interpolation between adjacent order statistics.
pub fn empirical_quantiles(wages: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if wages.is_empty() {
        return Err(Error::invalid("wages", "empty sample".to_string()));
    }
    if wages.iter().any(|w| !w.is_finite()) {
        return Err(Error::invalid("wages", "non-finite value".to_string()));
    }
    validate_probs(probs)?;
    let mut sorted = wages.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect())
}
