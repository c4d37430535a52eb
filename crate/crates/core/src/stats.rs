//! Self-contained statistics kernel: ordinary least squares with
//! heteroskedasticity-robust standard errors, Gaussian kernel density
//! estimation, geometric means, and the standard normal pdf/cdf.

// The erf/erfc coefficient tables keep their published 18-digit form.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Standard normal pdf / cdf
// ---------------------------------------------------------------------------

/// Compensated (Kahan) summation accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

// Rational minimax coefficients for erf/erfc from W. J. Cody,
// "Rational Chebyshev approximation for the error function",
// Mathematics of Computation 23 (1969), as used in the SPECFUN
// reference implementation. Relative accuracy is ~1e-16 in each branch,
// far inside the 1e-10 absolute contract for the normal cdf.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

const SQRT_PI_INV: f64 = 5.6418958354775628695e-1; // 1 / sqrt(pi)
const ERF_THRESHOLD: f64 = 0.46875;
const ERFC_XBIG: f64 = 26.543;

// erfc(y) * exp(y^2) tail evaluation for 0.46875 <= y <= 4.
fn erfc_mid(y: f64) -> f64 {
    let mut num = ERF_C[8] * y;
    let mut den = y;
    for i in 0..7 {
        num = (num + ERF_C[i]) * y;
        den = (den + ERF_D[i]) * y;
    }
    (num + ERF_C[7]) / (den + ERF_D[7])
}

// erfc(y) * exp(y^2) tail evaluation for y > 4.
fn erfc_far(y: f64) -> f64 {
    let ysq = 1.0 / (y * y);
    let mut num = ERF_P[5] * ysq;
    let mut den = ysq;
    for i in 0..4 {
        num = (num + ERF_P[i]) * ysq;
        den = (den + ERF_Q[i]) * ysq;
    }
    let r = ysq * (num + ERF_P[4]) / (den + ERF_Q[4]);
    (SQRT_PI_INV - r) / y
}

// exp(-y^2) computed as exp(-ysq^2) * exp(-(y-ysq)(y+ysq)) with ysq a
// 1/16-grid truncation of y, which avoids the cancellation error of
// squaring y directly in the argument.
fn exp_neg_ysq(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

/// Error function, `erf(x)`.
pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= ERF_THRESHOLD {
        let z = y * y;
        let mut num = ERF_A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + ERF_A[i]) * z;
            den = (den + ERF_B[i]) * z;
        }
        return x * (num + ERF_A[3]) / (den + ERF_B[3]);
    }
    let tail = if y <= 4.0 {
        exp_neg_ysq(y) * erfc_mid(y)
    } else if y < ERFC_XBIG {
        exp_neg_ysq(y) * erfc_far(y)
    } else {
        0.0
    };
    let r = (0.5 - tail) + 0.5;
    if x < 0.0 {
        -r
    } else {
        r
    }
}

/// Complementary error function, `erfc(x) = 1 - erf(x)`, accurate in the
/// far positive tail where `1 - erf(x)` would underflow to cancellation.
pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= ERF_THRESHOLD {
        return 1.0 - erf(x);
    }
    let tail = if y <= 4.0 {
        exp_neg_ysq(y) * erfc_mid(y)
    } else if y < ERFC_XBIG {
        exp_neg_ysq(y) * erfc_far(y)
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - tail
    } else {
        tail
    }
}

/// Standard normal density `phi(z)`.
pub fn std_normal_pdf(z: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function `Phi(z)`, absolute error <= 1e-10
/// (in practice ~1e-15).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

// ---------------------------------------------------------------------------
// Ordinary least squares with heteroskedasticity-robust standard errors
// ---------------------------------------------------------------------------

/// Heteroskedasticity-consistent covariance variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcVariant {
    /// Plain sandwich estimator.
    Hc0,
    /// Sandwich scaled by `n / (n - p)` (the usual small-sample correction).
    Hc1,
}

/// A fitted linear regression.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegressionFit {
    /// Least-squares coefficient estimates, one per design column.
    pub coefficients: Vec<f64>,
    /// Heteroskedasticity-robust standard errors, one per design column.
    pub robust_se: Vec<f64>,
    /// Coefficient of determination.
    pub r_squared: f64,
    /// Number of observations.
    pub n: usize,
}

/// Fits `response ~ design` by least squares via a Householder QR
/// decomposition and reports heteroskedasticity-robust standard errors
/// `(X'X)^-1 X' diag(e_i^2) X (X'X)^-1`, scaled by `n/(n-p)` under
/// [`HcVariant::Hc1`] (the scale is skipped for a saturated fit with
/// `n == p`, where all residuals are zero).
///
/// Each `design` row must include its own intercept column if one is wanted.
/// Errors on `n < p`, rank-deficient designs, or non-finite input. A constant
/// response has zero total variation; its `r_squared` is reported as 0.
#[allow(clippy::needless_range_loop)] // indexed loops mirror the matrix algebra
pub fn ols_robust(
    design: &[Vec<f64>],
    response: &[f64],
    variant: HcVariant,
) -> Result<RegressionFit> {
    let n = design.len();
    if n == 0 || response.len() != n {
        return Err(Error::invalid(
            "design",
            format!(
                "need one design row per response value, got {n} rows and {} responses",
                response.len()
            ),
        ));
    }
    let p = design[0].len();
    if p == 0 {
        return Err(Error::invalid(
            "design",
            "need at least one column".to_string(),
        ));
    }
    if design.iter().any(|row| row.len() != p) {
        return Err(Error::invalid("design", "ragged design matrix".to_string()));
    }
    if n < p {
        return Err(Error::DegenerateData(format!(
            "{n} observations cannot identify {p} coefficients"
        )));
    }
    if design.iter().flatten().any(|v| !v.is_finite()) || response.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("design", "non-finite value".to_string()));
    }

    // Working copies: `a` is reduced to R in place, `qty` accumulates Q'y.
    let mut a: Vec<Vec<f64>> = design.to_vec();
    let mut qty: Vec<f64> = response.to_vec();

    let col_scale = (0..p)
        .map(|j| (0..n).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let rank_tol = col_scale * (n.max(p) as f64) * f64::EPSILON * 16.0;

    for j in 0..p {
        // Householder reflector annihilating column j below the diagonal.
        let norm = (j..n).map(|i| a[i][j] * a[i][j]).sum::<f64>().sqrt();
        if norm <= rank_tol {
            return Err(Error::DegenerateData(format!(
                "design matrix is rank deficient at column {j}"
            )));
        }
        let alpha = if a[j][j] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| a[i][j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for col in j..p {
                let dot: f64 = (j..n).map(|i| v[i - j] * a[i][col]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..n {
                    a[i][col] -= f * v[i - j];
                }
            }
            let dot: f64 = (j..n).map(|i| v[i - j] * qty[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                qty[i] -= f * v[i - j];
            }
        }
        a[j][j] = alpha;
        for i in (j + 1)..n {
            a[i][j] = 0.0;
        }
    }

    // Back-substitute R beta = Q'y.
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let mut acc = qty[j];
        for k in (j + 1)..p {
            acc -= a[j][k] * beta[k];
        }
        beta[j] = acc / a[j][j];
    }

    // Residuals against the original design. A saturated fit (n == p)
    // interpolates every point, so its residuals are identically zero; the
    // recomputed values would only carry rounding noise into SSR and the
    // sandwich.
    let residuals: Vec<f64> = if n == p {
        vec![0.0; n]
    } else {
        (0..n)
            .map(|i| {
                let fit: f64 = (0..p).map(|j| design[i][j] * beta[j]).sum();
                response[i] - fit
            })
            .collect()
    };

    let ybar = response.iter().sum::<f64>() / n as f64;
    let sst: f64 = response.iter().map(|y| (y - ybar) * (y - ybar)).sum();
    let ssr: f64 = residuals.iter().map(|e| e * e).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        0.0
    };

    // (X'X)^-1 = Rinv Rinv' from the triangular factor.
    let mut rinv = vec![vec![0.0; p]; p];
    for col in 0..p {
        // Solve R x = e_col.
        for j in (0..=col).rev() {
            let mut acc = if j == col { 1.0 } else { 0.0 };
            for k in (j + 1)..=col {
                acc -= a[j][k] * rinv[k][col];
            }
            rinv[j][col] = acc / a[j][j];
        }
    }
    let mut xtx_inv = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            xtx_inv[i][j] = (0..p).map(|k| rinv[i][k] * rinv[j][k]).sum();
        }
    }

    // Meat: X' diag(e^2) X.
    let mut meat = vec![vec![0.0; p]; p];
    for i in 0..n {
        let e2 = residuals[i] * residuals[i];
        for r in 0..p {
            for c in 0..p {
                meat[r][c] += e2 * design[i][r] * design[i][c];
            }
        }
    }

    let factor = match variant {
        HcVariant::Hc0 => 1.0,
        HcVariant::Hc1 if n > p => n as f64 / (n - p) as f64,
        HcVariant::Hc1 => 1.0,
    };

    let mut robust_se = vec![0.0; p];
    for j in 0..p {
        // V = (X'X)^-1 M (X'X)^-1, diagonal entry j.
        let mut vjj = 0.0;
        for r in 0..p {
            for c in 0..p {
                vjj += xtx_inv[j][r] * meat[r][c] * xtx_inv[c][j];
            }
        }
        robust_se[j] = (vjj * factor).max(0.0).sqrt();
    }

    Ok(RegressionFit {
        coefficients: beta,
        robust_se,
        r_squared,
        n,
    })
}

// ---------------------------------------------------------------------------
// Kernel density estimation
// ---------------------------------------------------------------------------

/// Sample standard deviation (divisor `n - 1`); 0 for fewer than two points.
pub(crate) fn sample_sd(data: &[f64]) -> f64 {
    let n = data.len();
    if n < 2 {
        return 0.0;
    }
    let mean = data.iter().sum::<f64>() / n as f64;
    let ss: f64 = data.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Order-statistic quantile with linear interpolation between adjacent order
/// statistics (`h = (n - 1) p`). `sorted` must be non-empty and ascending;
/// `p` must lie in `[0, 1]`.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Silverman's rule-of-thumb bandwidth `0.9 * min(sd, IQR/1.34) * n^(-1/5)`,
/// falling back to the standard deviation when the interquartile range is
/// degenerate. Errors when no positive spread exists.
pub fn silverman_bandwidth(data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("data", "empty sample".to_string()));
    }
    let mut sorted = data.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sd = sample_sd(data);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let mut spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if spread <= 0.0 {
        spread = sd;
    }
    if spread <= 0.0 {
        return Err(Error::DegenerateData(
            "sample has no spread; give an explicit bandwidth".to_string(),
        ));
    }
    Ok(0.9 * spread * (data.len() as f64).powf(-0.2))
}

/// Gaussian kernel density estimate of `data` at each of `eval_points`.
/// `bandwidth` defaults to Silverman's rule when `None`.
pub fn kde(data: &[f64], eval_points: &[f64], bandwidth: Option<f64>) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::invalid("data", "empty sample".to_string()));
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("data", "non-finite value".to_string()));
    }
    let h = match bandwidth {
        Some(h) if h.is_finite() && h > 0.0 => h,
        Some(h) => {
            return Err(Error::invalid(
                "bandwidth",
                format!("must be positive, got {h}"),
            ))
        }
        None => silverman_bandwidth(data)?,
    };
    let n = data.len() as f64;
    Ok(eval_points
        .iter()
        .map(|&x| {
            let mut acc = KahanSum::new();
            for &xi in data {
                acc.add(std_normal_pdf((x - xi) / h));
            }
            acc.value() / (n * h)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Geometric mean
// ---------------------------------------------------------------------------

/// Geometric mean `exp(mean(log values))` of strictly positive values.
pub fn geometric_mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("values", "empty sample".to_string()));
    }
    let mut acc = KahanSum::new();
    for &v in values {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::invalid(
                "values",
                format!("geometric mean requires positive values, got {v}"),
            ));
        }
        acc.add(v.ln());
    }
    Ok((acc.value() / values.len() as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed independently with 50-digit arithmetic and
    // rounded to f64 before the implementation was written.
    const CDF_TABLE: [(f64, f64); 9] = [
        (0.0, 0.5),
        (0.5, 0.6914624612740131),
        (1.0, 0.8413447460685429),
        (1.959964, 0.9750000009035576),
        (2.5, 0.9937903346742239),
        (-3.7, 0.0001077997334773883),
        (5.0, 0.9999997133484281),
        (-5.0, 2.866515718791939e-7),
        (8.0, 0.9999999999999994),
    ];

    const PDF_TABLE: [(f64, f64); 6] = [
        (0.0, 0.3989422804014327),
        (1.0, 0.2419707245191433),
        (1.959964, 0.05844506803409501),
        (-3.7, 0.0004247802705507517),
        (5.0, 1.486719514734298e-6),
        (8.0, 5.052271083536892e-15),
    ];

    #[test]
    fn normal_cdf_matches_reference_table() {
        for (z, expected) in CDF_TABLE {
            let got = std_normal_cdf(z);
            assert!(
                (got - expected).abs() <= 1e-12,
                "Phi({z}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn normal_pdf_matches_reference_table() {
        for (z, expected) in PDF_TABLE {
            let got = std_normal_pdf(z);
            assert!(
                ((got - expected) / expected).abs() <= 1e-13,
                "phi({z}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn normal_cdf_symmetry() {
        let mut z = -6.0;
        while z <= 6.0 {
            let a = std_normal_cdf(z);
            let b = 1.0 - std_normal_cdf(-z);
            assert!((a - b).abs() < 1e-12, "asymmetry at z = {z}");
            z += 0.1;
        }
    }

    #[test]
    fn erf_basic_identities() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-14);
        assert!((erfc(1.0) - 0.15729920705028513).abs() < 1e-14);
        assert!((erfc(6.0) - 2.1519736712498913e-17).abs() < 1e-30);
        assert_eq!(erfc(30.0), 0.0);
        assert!((erfc(-2.0) - (2.0 - erfc(2.0))).abs() < 1e-14);
    }

    fn hand_dataset() -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = vec![1.0, 2.0, 2.0, 4.0, 4.0, 7.0];
        let design = xs.iter().map(|&x| vec![1.0, x]).collect();
        (design, ys)
    }

    #[test]
    fn ols_matches_exact_rational_hand_computation() {
        // Expected values computed by hand in exact rational arithmetic:
        // beta = (13/21, 38/35), R^2 = 1083/1225.
        let (design, ys) = hand_dataset();
        let fit = ols_robust(&design, &ys, HcVariant::Hc1).unwrap();
        assert!((fit.coefficients[0] - 0.6190476190476191).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0857142857142856).abs() < 1e-12);
        assert!((fit.robust_se[0] - 0.4295981654270153).abs() < 1e-12);
        assert!((fit.robust_se[1] - 0.210119129521481).abs() < 1e-12);
        assert!((fit.r_squared - 0.8840816326530613).abs() < 1e-12);

        let fit0 = ols_robust(&design, &ys, HcVariant::Hc0).unwrap();
        assert!((fit0.robust_se[0] - 0.35076543324398163).abs() < 1e-12);
        assert!((fit0.robust_se[1] - 0.17156155084179928).abs() < 1e-12);
    }

    #[test]
    fn hc1_is_hc0_scaled_by_dof_ratio() {
        let (design, ys) = hand_dataset();
        let f0 = ols_robust(&design, &ys, HcVariant::Hc0).unwrap();
        let f1 = ols_robust(&design, &ys, HcVariant::Hc1).unwrap();
        let ratio = (6.0f64 / 4.0).sqrt();
        for j in 0..2 {
            let rel = (f1.robust_se[j] / f0.robust_se[j] - ratio).abs() / ratio;
            assert!(rel < 1e-14);
        }
    }

    #[test]
    fn ols_normal_equations_hold() {
        let (design, ys) = hand_dataset();
        let fit = ols_robust(&design, &ys, HcVariant::Hc1).unwrap();
        let scale: f64 = ys.iter().map(|y| y.abs()).sum();
        for j in 0..2 {
            let dot: f64 = (0..ys.len())
                .map(|i| {
                    let fitted: f64 = (0..2).map(|k| design[i][k] * fit.coefficients[k]).sum();
                    design[i][j] * (ys[i] - fitted)
                })
                .sum();
            assert!(dot.abs() < 1e-8 * scale, "X'e != 0 at column {j}");
        }
    }

    #[test]
    fn ols_saturated_two_point_fit() {
        let design = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let ys = vec![3.0, 7.0];
        let fit = ols_robust(&design, &ys, HcVariant::Hc1).unwrap();
        assert!((fit.coefficients[0] - 3.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 4.0).abs() < 1e-12);
        assert_eq!(fit.robust_se, vec![0.0, 0.0]);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn ols_constant_response() {
        let design: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let ys = vec![5.0; 5];
        let fit = ols_robust(&design, &ys, HcVariant::Hc1).unwrap();
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn ols_rejects_bad_input() {
        // n < p
        let design = vec![vec![1.0, 0.0, 2.0], vec![1.0, 1.0, 3.0]];
        assert!(ols_robust(&design, &[1.0, 2.0], HcVariant::Hc1).is_err());
        // rank deficient: duplicated column
        let design: Vec<Vec<f64>> = (0..6).map(|i| vec![1.0, i as f64, i as f64]).collect();
        let ys: Vec<f64> = (0..6).map(|i| i as f64).collect();
        assert!(matches!(
            ols_robust(&design, &ys, HcVariant::Hc1),
            Err(Error::DegenerateData(_))
        ));
        // empty
        assert!(ols_robust(&[], &[], HcVariant::Hc1).is_err());
    }

    #[test]
    fn log_regression_intercepts_bridge_to_geometric_means() {
        // Saturated two-group regression of log values on a group indicator:
        // exp(intercept) is the geometric mean of the baseline group, and
        // exp(intercept + slope) the geometric mean of the indicator group.
        let g0: [f64; 4] = [1.2, 3.4, 0.7, 2.2];
        let g1: [f64; 3] = [4.4, 1.9, 2.8];
        let mut design = Vec::new();
        let mut resp = Vec::new();
        for v in g0 {
            design.push(vec![1.0, 0.0]);
            resp.push(v.ln());
        }
        for v in g1 {
            design.push(vec![1.0, 1.0]);
            resp.push(v.ln());
        }
        let fit = ols_robust(&design, &resp, HcVariant::Hc1).unwrap();
        let gm0 = geometric_mean(&g0).unwrap();
        let gm1 = geometric_mean(&g1).unwrap();
        assert!((fit.coefficients[0].exp() - gm0).abs() < 1e-10);
        assert!(((fit.coefficients[0] + fit.coefficients[1]).exp() - gm1).abs() < 1e-10);
    }

    #[test]
    fn kde_single_point_standard_kernel() {
        let d = kde(&[0.0], &[0.0], Some(1.0)).unwrap();
        assert!((d[0] - 0.39894).abs() < 1e-5);
    }

    #[test]
    fn kde_integrates_to_one() {
        // Seeded two-bump sample; trapezoid rule over a wide grid.
        let data: Vec<f64> = (0..40)
            .map(|i| {
                if i % 2 == 0 {
                    i as f64 * 0.1
                } else {
                    5.0 + i as f64 * 0.05
                }
            })
            .collect();
        let lo = -10.0;
        let hi = 20.0;
        let m = 3000;
        let grid: Vec<f64> = (0..=m)
            .map(|i| lo + (hi - lo) * i as f64 / m as f64)
            .collect();
        let dens = kde(&data, &grid, None).unwrap();
        let step = (hi - lo) / m as f64;
        let mass: f64 = dens.windows(2).map(|w| 0.5 * (w[0] + w[1]) * step).sum();
        assert!((mass - 1.0).abs() < 0.01, "mass = {mass}");
        assert!(dens.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn kde_symmetric_data_symmetric_density() {
        let data = [-2.0, -1.0, 1.0, 2.0];
        let pts = [0.5, 1.5, 2.5];
        let mirrored = [-0.5, -1.5, -2.5];
        let a = kde(&data, &pts, Some(0.8)).unwrap();
        let b = kde(&data, &mirrored, Some(0.8)).unwrap();
        for j in 0..pts.len() {
            assert!((a[j] - b[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn kde_rejects_bad_bandwidth() {
        assert!(kde(&[1.0, 2.0], &[0.0], Some(0.0)).is_err());
        assert!(kde(&[1.0, 2.0], &[0.0], Some(-1.0)).is_err());
        assert!(kde(&[], &[0.0], None).is_err());
        // No spread and no explicit bandwidth.
        assert!(kde(&[3.0, 3.0, 3.0], &[0.0], None).is_err());
    }

    #[test]
    fn silverman_matches_hand_computation() {
        let data = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let sd = sample_sd(&data);
        let iqr = 6.25 - 2.75; // type-7 quartiles of 1..8
        let expect = 0.9 * sd.min(iqr / 1.34) * (8.0f64).powf(-0.2);
        let got = silverman_bandwidth(&data).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn geometric_mean_examples() {
        assert_eq!(geometric_mean(&[7.25]).unwrap(), 7.25);
        assert!((geometric_mean(&[1.0, 4.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(geometric_mean(&[1.0, 0.0]).is_err());
        assert!(geometric_mean(&[1.0, -2.0]).is_err());
        assert!(geometric_mean(&[]).is_err());
        // Log-scale coefficients exponentiate to dollar-scale geometric means.
        assert!(((0.447f64).exp() - 1.56).abs() < 0.01);
    }

    #[test]
    fn quantile_type7_examples() {
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0], 0.0), 1.0);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0], 1.0), 3.0);
    }
}
