//! One-stop analysis pipeline: regressions, wage imputation, calibration,
//! focal-point tests, and figure-ready data series from a set of session
//! records.
//!
//! The report reconciles worker counts (`n_total = n_zero + n_imputed +
//! n_censored_at_cap`), runs the standard regression suite on a binary
//! group indicator with HC1 robust standard errors, and emits histogram and
//! density series as structured data for external plotting.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::calibration::{empirical_quantiles, fit_lognormal, point_elasticity, CalibrationResult};
use crate::error::{Error, Result};
use crate::estimation::{impute_wage, WageEstimate};
use crate::focal::{focal_point_test, FocalOptions, FocalTestResult, PwMode};
use crate::schedule::PaymentSchedule;
use crate::sim::SessionRecord;
use crate::stats::{kde, ols_robust, silverman_bandwidth, HcVariant, RegressionFit};

/// Options controlling the analysis pipeline.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// A worker "quit early" when `y < early_quit_cutoff`.
    pub early_quit_cutoff: u32,
    /// Group whose indicator equals 1 in the regressions; defaults to the
    /// first group label encountered in the records.
    pub indicator_group: Option<String>,
    /// Include cap-censored workers in wage aggregates (geometric means,
    /// calibration, wage table, KDE). Estimates always list them, flagged.
    pub include_censored: bool,
    /// Modulus for the focal-point divisibility test.
    pub focal_modulus: u32,
    /// Whether realizable whole-cent values are deduplicated for the focal
    /// test's null fraction.
    pub focal_mode: PwMode,
    /// Probabilities for the wage quantile table.
    pub quantile_probs: Vec<f64>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            early_quit_cutoff: 10,
            indicator_group: None,
            include_censored: true,
            focal_modulus: 5,
            focal_mode: PwMode::Set,
            quantile_probs: vec![0.25, 0.5, 0.75],
        }
    }
}

/// The regression suite: each fit regresses its response on an intercept
/// and the binary group indicator. A slot is `None` when its subsample is
/// too small or the indicator is constant on it.
#[derive(Debug, Clone, Serialize)]
pub struct Regressions {
    /// Output in levels, all workers.
    pub levels_y: Option<RegressionFit>,
    /// Log output, workers with `y >= 1`.
    pub log_y: Option<RegressionFit>,
    /// Mean block time, all workers.
    pub block_time: Option<RegressionFit>,
    /// Log imputed wage, workers with an estimate.
    pub log_wage: Option<RegressionFit>,
    /// Early-quit indicator `1{y < cutoff}`, all workers.
    pub early_quit: Option<RegressionFit>,
}

/// A wage estimate joined back to the worker's group label (the estimate CSV
/// itself carries no group column).
#[derive(Debug, Clone, Serialize)]
pub struct WorkerEstimate {
    /// Worker identifier from the session record.
    pub worker_id: u64,
    /// Group label from the session record.
    pub group: String,
    /// Blocks completed.
    pub y: u32,
    /// Mean block time, seconds.
    pub t_bar_s: f64,
    /// Point estimate of the reservation wage, cents/second.
    pub omega_cents_per_s: f64,
    /// Point estimate, dollars/hour.
    pub omega_usd_per_hr: f64,
    /// Bracket lower bound, dollars/hour.
    pub lower_usd_per_hr: f64,
    /// Bracket upper bound, dollars/hour.
    pub upper_usd_per_hr: f64,
    /// Whether the worker hit the output cap.
    pub censored: bool,
}

impl WorkerEstimate {
    fn new(worker_id: u64, group: &str, estimate: &WageEstimate) -> Self {
        WorkerEstimate {
            worker_id,
            group: group.to_string(),
            y: estimate.y,
            t_bar_s: estimate.t_bar,
            omega_cents_per_s: estimate.omega_hat,
            omega_usd_per_hr: estimate.omega_usd_per_hour(),
            lower_usd_per_hr: estimate.lower_usd_per_hour(),
            upper_usd_per_hr: estimate.upper_usd_per_hour(),
            censored: estimate.censored,
        }
    }
}

/// One row of the wage quantile/elasticity table.
#[derive(Debug, Clone, Serialize)]
pub struct WageTableRow {
    /// Row label: `p25`, `median`, `p75`, ... or `mean`.
    pub label: String,
    /// Wage at this row, dollars/hour (empirical over included estimates).
    pub wage_usd_per_hr: f64,
    /// Point elasticity of participation at this wage under the fitted
    /// log-normal.
    pub elasticity: f64,
}

/// One bin of a dense output histogram.
#[derive(Debug, Clone, Serialize)]
pub struct OutputBin {
    /// Blocks completed.
    pub y: u32,
    /// Workers at exactly this output.
    pub count: u64,
}

/// One evaluation point of the log-wage kernel density estimate.
#[derive(Debug, Clone, Serialize)]
pub struct KdePoint {
    /// Log wage, log dollars/hour.
    pub log_wage_usd_per_hr: f64,
    /// Estimated density.
    pub density: f64,
}

/// One bin of the sparse earnings-by-whole-cent histogram.
#[derive(Debug, Clone, Serialize)]
pub struct CentBin {
    /// Whole-cent earnings floor.
    pub cents: u64,
    /// Workers whose earnings floor to this value.
    pub count: u64,
}

/// Figure-ready series for one group.
#[derive(Debug, Clone, Serialize)]
pub struct GroupSeries {
    /// Unit-bin output histogram covering `0..=max(y)` (zeros included).
    pub output_histogram: Vec<OutputBin>,
    /// KDE of log imputed wages on an evenly spaced grid; empty when the
    /// group has too few distinct estimates for a bandwidth.
    pub log_wage_kde: Vec<KdePoint>,
    /// Whole-cent earnings histogram over workers with `y >= 1`.
    pub whole_cent_histogram: Vec<CentBin>,
}

/// Full analysis output.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    /// Workers in the input.
    pub n_total: usize,
    /// Workers with `y = 0` (excluded from imputation).
    pub n_zero: usize,
    /// Workers with `0 < y < cap` (interior, bracketed estimates).
    pub n_imputed: usize,
    /// Workers at the cap (censored estimates).
    pub n_censored_at_cap: usize,
    /// Group coded 1 in the regressions.
    pub indicator_group: String,
    /// Regression suite.
    pub regressions: Regressions,
    /// Geometric mean imputed wage by group, dollars/hour.
    pub geometric_mean_wage_by_group: BTreeMap<String, f64>,
    /// Per-worker wage estimates, sorted by worker id.
    pub estimates: Vec<WorkerEstimate>,
    /// Log-normal fit of included wages; `None` when fewer than two.
    pub calibration: Option<CalibrationResult>,
    /// Empirical wage quantiles and the mean, each with its model-implied
    /// participation elasticity.
    pub wage_table: Vec<WageTableRow>,
    /// Focal-point test per group (groups with no positive output are
    /// skipped).
    pub focal: BTreeMap<String, FocalTestResult>,
    /// Figure-ready series per group.
    pub series: BTreeMap<String, GroupSeries>,
}

fn fit_on_indicator(rows: &[(f64, f64)]) -> Option<RegressionFit> {
    if rows.len() < 2 {
        return None;
    }
    let ones = rows.iter().filter(|(ind, _)| *ind == 1.0).count();
    if ones == 0 || ones == rows.len() {
        return None;
    }
    let design: Vec<Vec<f64>> = rows.iter().map(|(ind, _)| vec![1.0, *ind]).collect();
    let response: Vec<f64> = rows.iter().map(|(_, resp)| *resp).collect();
    ols_robust(&design, &response, HcVariant::Hc1).ok()
}

fn quantile_label(p: f64) -> String {
    if p == 0.5 {
        "median".to_string()
    } else {
        let pct = p * 100.0;
        if (pct - pct.round()).abs() < 1e-9 {
            format!("p{}", pct.round() as u32)
        } else {
            format!("p{pct}")
        }
    }
}

/// Runs the full pipeline over `records`, looking up each group's payment
/// schedule in `schedules`.
pub fn analyze(
    records: &[SessionRecord],
    schedules: &BTreeMap<String, PaymentSchedule>,
    options: &AnalyzeOptions,
) -> Result<AnalysisReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument {
            name: "records",
            reason: "no session records to analyze".to_string(),
        });
    }
    for r in records {
        if !schedules.contains_key(&r.group) {
            return Err(Error::InvalidArgument {
                name: "schedules",
                reason: format!("no schedule for group `{}`", r.group),
            });
        }
    }
    if records.iter().all(|r| r.y == 0) {
        return Err(Error::DegenerateData(
            "every worker produced zero output; nothing to impute".to_string(),
        ));
    }

    // First-seen group order fixes the default indicator group.
    let mut group_order: Vec<&str> = Vec::new();
    for r in records {
        if !group_order.contains(&r.group.as_str()) {
            group_order.push(&r.group);
        }
    }
    let indicator_group = match &options.indicator_group {
        Some(g) => {
            if !group_order.contains(&g.as_str()) {
                return Err(Error::InvalidArgument {
                    name: "indicator_group",
                    reason: format!("group `{g}` does not appear in the records"),
                });
            }
            g.clone()
        }
        None => group_order[0].to_string(),
    };

    // Imputation pass. Estimates are sorted by worker id for stable output.
    let mut estimates: Vec<WorkerEstimate> = Vec::new();
    let mut n_zero = 0usize;
    let mut n_censored = 0usize;
    for r in records {
        if r.y == 0 {
            n_zero += 1;
            continue;
        }
        let sched = &schedules[&r.group];
        let est = impute_wage(sched, r.y, r.t_bar)?;
        if est.censored {
            n_censored += 1;
        }
        estimates.push(WorkerEstimate::new(r.worker_id, &r.group, &est));
    }
    estimates.sort_by_key(|e| e.worker_id);
    let n_imputed = estimates.len() - n_censored;

    let included = |e: &&WorkerEstimate| options.include_censored || !e.censored;

    // Regression suite.
    let ind = |group: &str| -> f64 { (group == indicator_group) as u8 as f64 };
    let levels: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (ind(&r.group), r.y as f64))
        .collect();
    let logs: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.y >= 1)
        .map(|r| (ind(&r.group), (r.y as f64).ln()))
        .collect();
    let times: Vec<(f64, f64)> = records.iter().map(|r| (ind(&r.group), r.t_bar)).collect();
    let wages_rows: Vec<(f64, f64)> = estimates
        .iter()
        .filter(included)
        .map(|e| (ind(&e.group), e.omega_usd_per_hr.ln()))
        .collect();
    let quits: Vec<(f64, f64)> = records
        .iter()
        .map(|r| {
            (
                ind(&r.group),
                (r.y < options.early_quit_cutoff) as u8 as f64,
            )
        })
        .collect();
    let regressions = Regressions {
        levels_y: fit_on_indicator(&levels),
        log_y: fit_on_indicator(&logs),
        block_time: fit_on_indicator(&times),
        log_wage: fit_on_indicator(&wages_rows),
        early_quit: fit_on_indicator(&quits),
    };

    // Wage aggregates over included estimates.
    let mut geo_means = BTreeMap::new();
    for label in &group_order {
        let wages: Vec<f64> = estimates
            .iter()
            .filter(included)
            .filter(|e| e.group == *label)
            .map(|e| e.omega_usd_per_hr)
            .collect();
        if let Ok(g) = crate::stats::geometric_mean(&wages) {
            geo_means.insert(label.to_string(), g);
        }
    }

    let all_wages: Vec<f64> = estimates
        .iter()
        .filter(included)
        .map(|e| e.omega_usd_per_hr)
        .collect();
    let calibration = fit_lognormal(&all_wages, &options.quantile_probs).ok();
    let mut wage_table = Vec::new();
    if let Some(calib) = &calibration {
        let qs = empirical_quantiles(&all_wages, &options.quantile_probs)?;
        for (p, wage) in options.quantile_probs.iter().zip(qs) {
            wage_table.push(WageTableRow {
                label: quantile_label(*p),
                wage_usd_per_hr: wage,
                elasticity: point_elasticity(calib.mu, calib.sigma, wage)?,
            });
        }
        let mean = all_wages.iter().sum::<f64>() / all_wages.len() as f64;
        wage_table.push(WageTableRow {
            label: "mean".to_string(),
            wage_usd_per_hr: mean,
            elasticity: point_elasticity(calib.mu, calib.sigma, mean)?,
        });
    }

    // Per-group focal tests and figure series.
    let mut focal = BTreeMap::new();
    let mut series = BTreeMap::new();
    for label in &group_order {
        let sched = &schedules[*label];
        let group_records: Vec<&SessionRecord> =
            records.iter().filter(|r| r.group == *label).collect();
        let outputs: Vec<u32> = group_records
            .iter()
            .filter(|r| r.y >= 1)
            .map(|r| r.y)
            .collect();

        if !outputs.is_empty() {
            let opts = FocalOptions {
                mode: options.focal_mode,
                max_y: None,
                exclude_terminal: false,
            };
            if let Ok(test) = focal_point_test(&outputs, sched, options.focal_modulus, &opts) {
                focal.insert(label.to_string(), test);
            }
        }

        let max_y = group_records.iter().map(|r| r.y).max().unwrap_or(0);
        let mut counts = vec![0u64; max_y as usize + 1];
        for r in &group_records {
            counts[r.y as usize] += 1;
        }
        let output_histogram = counts
            .into_iter()
            .enumerate()
            .map(|(y, count)| OutputBin { y: y as u32, count })
            .collect();

        let log_wages: Vec<f64> = estimates
            .iter()
            .filter(included)
            .filter(|e| e.group == *label)
            .map(|e| e.omega_usd_per_hr.ln())
            .collect();
        let log_wage_kde = match silverman_bandwidth(&log_wages) {
            Ok(h) => {
                let lo = log_wages.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * h;
                let hi = log_wages.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * h;
                let n_points = 120usize;
                let step = (hi - lo) / (n_points - 1) as f64;
                let grid: Vec<f64> = (0..n_points).map(|i| lo + step * i as f64).collect();
                let dens = kde(&log_wages, &grid, Some(h))?;
                grid.into_iter()
                    .zip(dens)
                    .map(|(x, d)| KdePoint {
                        log_wage_usd_per_hr: x,
                        density: d,
                    })
                    .collect()
            }
            Err(_) => Vec::new(),
        };

        let mut cent_counts: BTreeMap<u64, u64> = BTreeMap::new();
        for r in &group_records {
            if r.y >= 1 {
                let whole = crate::schedule::split_cents(r.earnings)?.whole;
                *cent_counts.entry(whole).or_insert(0) += 1;
            }
        }
        let whole_cent_histogram = cent_counts
            .into_iter()
            .map(|(cents, count)| CentBin { cents, count })
            .collect();

        series.insert(
            label.to_string(),
            GroupSeries {
                output_histogram,
                log_wage_kde,
                whole_cent_histogram,
            },
        );
    }

    Ok(AnalysisReport {
        n_total: records.len(),
        n_zero,
        n_imputed,
        n_censored_at_cap: n_censored,
        indicator_group,
        regressions,
        geometric_mean_wage_by_group: geo_means,
        estimates,
        calibration,
        wage_table,
        focal,
        series,
    })
}

fn sanitize_label(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    if s.is_empty() {
        "_".to_string()
    } else {
        s
    }
}

/// Writes each group's figure series under `dir` as
/// `output_hist_<label>.csv` (`y,count`),
/// `log_wage_kde_<label>.csv` (`log_wage_usd_per_hr,density`), and
/// `whole_cent_hist_<label>.csv` (`cents,count`). Creates `dir` if needed.
pub fn emit_series(report: &AnalysisReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (label, series) in &report.series {
        let tag = sanitize_label(label);

        let mut w = csv::Writer::from_path(dir.join(format!("output_hist_{tag}.csv")))
            .map_err(|e| Error::Config(e.to_string()))?;
        for bin in &series.output_histogram {
            w.serialize(bin).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(format!("log_wage_kde_{tag}.csv")))
            .map_err(|e| Error::Config(e.to_string()))?;
        for pt in &series.log_wage_kde {
            w.serialize(pt).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(format!("whole_cent_hist_{tag}.csv")))
            .map_err(|e| Error::Config(e.to_string()))?;
        for bin in &series.whole_cent_histogram {
            w.serialize(bin).map_err(|e| Error::Config(e.to_string()))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_experiment, GroupConfig, PopulationConfig, ScheduleConfig};

    fn two_group_config(seed: u64) -> PopulationConfig {
        PopulationConfig {
            // High-ish mu so a visible share of workers stay home (y = 0);
            // the 25% of target earners chasing the unreachable whole amount
            // grind to the cap, giving censored records too.
            mu: 1.2,
            sigma: 1.6,
            rho: 0.3,
            seed,
            groups: vec![
                GroupConfig {
                    label: "LOW".to_string(),
                    n_workers: 150,
                    schedule: ScheduleConfig {
                        pbar: 10.0,
                        half_life: 10.0,
                        cap: 200,
                        show_up_fee: 0.0,
                    },
                    block_time_mean: 6.0,
                    block_time_sd: None,
                    target_weights: None,
                },
                GroupConfig {
                    label: "HIGH".to_string(),
                    n_workers: 150,
                    schedule: ScheduleConfig {
                        pbar: 30.0,
                        half_life: 10.0,
                        cap: 200,
                        show_up_fee: 0.0,
                    },
                    block_time_mean: 6.0,
                    block_time_sd: None,
                    target_weights: None,
                },
            ],
        }
    }

    fn schedules_of(cfg: &PopulationConfig) -> BTreeMap<String, PaymentSchedule> {
        cfg.groups
            .iter()
            .map(|g| (g.label.clone(), g.schedule.build().unwrap()))
            .collect()
    }

    fn manual_record(
        worker_id: u64,
        group: &str,
        y: u32,
        sched: &PaymentSchedule,
    ) -> SessionRecord {
        SessionRecord {
            worker_id,
            group: group.to_string(),
            y,
            t_bar: 6.0,
            earnings: sched.total_payment(y).unwrap(),
            misses: 0,
        }
    }

    #[test]
    fn counts_reconcile_and_report_is_complete() {
        let cfg = two_group_config(31);
        let records = simulate_experiment(&cfg).unwrap();
        let schedules = schedules_of(&cfg);
        let report = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();

        assert_eq!(report.n_total, 300);
        assert_eq!(
            report.n_total,
            report.n_zero + report.n_imputed + report.n_censored_at_cap
        );
        assert!(report.n_zero > 0, "expected some non-starters");
        assert!(report.n_censored_at_cap > 0, "expected some cap-grinders");
        assert_eq!(
            report.estimates.len(),
            report.n_imputed + report.n_censored_at_cap
        );
        for pair in report.estimates.windows(2) {
            assert!(pair[0].worker_id < pair[1].worker_id);
        }
        assert_eq!(report.indicator_group, "LOW");

        for fit in [
            &report.regressions.levels_y,
            &report.regressions.log_y,
            &report.regressions.block_time,
            &report.regressions.log_wage,
            &report.regressions.early_quit,
        ] {
            let fit = fit.as_ref().expect("regression should be estimable");
            assert_eq!(fit.coefficients.len(), 2);
            assert!(fit.robust_se.iter().all(|s| s.is_finite() && *s >= 0.0));
        }

        assert_eq!(report.geometric_mean_wage_by_group.len(), 2);
        assert!(report
            .geometric_mean_wage_by_group
            .values()
            .all(|g| g.is_finite() && *g > 0.0));

        let calib = report.calibration.as_ref().expect("calibration should fit");
        assert!(calib.sigma > 0.0);
        assert_eq!(calib.n, report.estimates.len());

        assert_eq!(report.wage_table.len(), 4);
        assert_eq!(report.wage_table[0].label, "p25");
        assert_eq!(report.wage_table[1].label, "median");
        assert_eq!(report.wage_table[2].label, "p75");
        assert_eq!(report.wage_table[3].label, "mean");
        assert!(report.wage_table[0].wage_usd_per_hr <= report.wage_table[1].wage_usd_per_hr);
        assert!(report.wage_table[1].wage_usd_per_hr <= report.wage_table[2].wage_usd_per_hr);
        // Elasticity falls with the wage under the fitted log-normal.
        assert!(report.wage_table[0].elasticity > report.wage_table[2].elasticity);

        assert_eq!(report.focal.len(), 2);
        for test in report.focal.values() {
            assert!(test.p_value > 0.0 && test.p_value <= 1.0);
            assert_eq!(test.modulus, 5);
        }

        for label in ["LOW", "HIGH"] {
            let series = &report.series[label];
            let total: u64 = series.output_histogram.iter().map(|b| b.count).sum();
            assert_eq!(total, 150);
            assert_eq!(series.output_histogram[0].y, 0);
            assert!(series.output_histogram[0].count > 0);
            let positive: u64 = series.whole_cent_histogram.iter().map(|b| b.count).sum();
            let zeros = records
                .iter()
                .filter(|r| r.group == label && r.y == 0)
                .count() as u64;
            assert_eq!(positive + zeros, 150);
            assert!(!series.log_wage_kde.is_empty());
            // Trapezoid mass of the KDE should be close to 1.
            let mut mass = 0.0;
            for pair in series.log_wage_kde.windows(2) {
                let dx = pair[1].log_wage_usd_per_hr - pair[0].log_wage_usd_per_hr;
                mass += 0.5 * (pair[0].density + pair[1].density) * dx;
            }
            assert!((mass - 1.0).abs() < 0.02, "KDE mass {mass}");
        }
    }

    #[test]
    fn identical_output_across_groups_zeroes_the_group_coefficient() {
        let sched = PaymentSchedule::new(30.0, 10.0, 200, 0.0).unwrap();
        let mut schedules = BTreeMap::new();
        schedules.insert("A".to_string(), sched.clone());
        schedules.insert("B".to_string(), sched.clone());
        let records: Vec<SessionRecord> = (0..6)
            .map(|i| manual_record(i, if i < 3 { "A" } else { "B" }, 7, &sched))
            .collect();
        let report = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        let fit = report.regressions.levels_y.as_ref().unwrap();
        assert!((fit.coefficients[0] - 7.0).abs() < 1e-12);
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert_eq!(fit.r_squared, 0.0);
    }

    #[test]
    fn early_quit_cutoff_is_strict() {
        let sched = PaymentSchedule::new(30.0, 10.0, 200, 0.0).unwrap();
        let mut schedules = BTreeMap::new();
        schedules.insert("A".to_string(), sched.clone());
        schedules.insert("B".to_string(), sched.clone());
        // Group A sits exactly at the cutoff (not an early quit), group B one
        // block below it (early quit).
        let mut records = Vec::new();
        for i in 0..3 {
            records.push(manual_record(i, "A", 10, &sched));
        }
        for i in 3..6 {
            records.push(manual_record(i, "B", 9, &sched));
        }
        let report = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        let fit = report.regressions.early_quit.as_ref().unwrap();
        // Indicator group is A (first seen): intercept = B's early-quit rate
        // = 1, coefficient = A minus B = -1.
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn indicator_override_flips_the_contrast() {
        let cfg = two_group_config(57);
        let records = simulate_experiment(&cfg).unwrap();
        let schedules = schedules_of(&cfg);
        let base = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        let flipped = analyze(
            &records,
            &schedules,
            &AnalyzeOptions {
                indicator_group: Some("HIGH".to_string()),
                ..AnalyzeOptions::default()
            },
        )
        .unwrap();
        assert_eq!(base.indicator_group, "LOW");
        assert_eq!(flipped.indicator_group, "HIGH");
        let b = base.regressions.levels_y.as_ref().unwrap();
        let f = flipped.regressions.levels_y.as_ref().unwrap();
        // Same contrast, opposite sign; intercepts are the two group means.
        assert!((b.coefficients[1] + f.coefficients[1]).abs() < 1e-9);
        assert!((b.coefficients[0] - (f.coefficients[0] + f.coefficients[1])).abs() < 1e-9);
    }

    #[test]
    fn censored_workers_can_be_excluded_from_wage_aggregates() {
        let cfg = two_group_config(73);
        let records = simulate_experiment(&cfg).unwrap();
        let schedules = schedules_of(&cfg);
        let with = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        let without = analyze(
            &records,
            &schedules,
            &AnalyzeOptions {
                include_censored: false,
                ..AnalyzeOptions::default()
            },
        )
        .unwrap();
        assert!(with.n_censored_at_cap > 0);
        // Estimates still list censored workers either way.
        assert_eq!(with.estimates.len(), without.estimates.len());
        let with_calib = with.calibration.as_ref().unwrap();
        let without_calib = without.calibration.as_ref().unwrap();
        assert_eq!(without_calib.n, with_calib.n - with.n_censored_at_cap);
        // Censored wage estimates are tiny, so dropping them raises the
        // geometric means.
        for (label, g) in &without.geometric_mean_wage_by_group {
            assert!(g >= &with.geometric_mean_wage_by_group[label]);
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let sched = PaymentSchedule::new(30.0, 10.0, 200, 0.0).unwrap();
        let mut schedules = BTreeMap::new();
        schedules.insert("A".to_string(), sched.clone());

        assert!(analyze(&[], &schedules, &AnalyzeOptions::default()).is_err());

        let records = vec![
            manual_record(0, "A", 0, &sched),
            manual_record(1, "A", 0, &sched),
        ];
        assert!(matches!(
            analyze(&records, &schedules, &AnalyzeOptions::default()),
            Err(Error::DegenerateData(_))
        ));

        let records = vec![manual_record(0, "MYSTERY", 5, &sched)];
        assert!(analyze(&records, &schedules, &AnalyzeOptions::default()).is_err());

        let records = vec![manual_record(0, "A", 5, &sched)];
        assert!(analyze(
            &records,
            &schedules,
            &AnalyzeOptions {
                indicator_group: Some("NOPE".to_string()),
                ..AnalyzeOptions::default()
            }
        )
        .is_err());
    }

    #[test]
    fn single_group_still_produces_estimates_without_regressions() {
        let sched = PaymentSchedule::new(30.0, 10.0, 200, 0.0).unwrap();
        let mut schedules = BTreeMap::new();
        schedules.insert("A".to_string(), sched.clone());
        let records: Vec<SessionRecord> = (0..20)
            .map(|i| manual_record(i, "A", 3 + (i as u32 % 7) * 4, &sched))
            .collect();
        let report = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        assert!(report.regressions.levels_y.is_none());
        assert!(report.regressions.log_wage.is_none());
        assert_eq!(report.estimates.len(), 20);
        assert!(report.calibration.is_some());
        assert!(report.focal.contains_key("A"));
    }

    #[test]
    fn series_files_are_emitted() {
        let cfg = two_group_config(91);
        let records = simulate_experiment(&cfg).unwrap();
        let schedules = schedules_of(&cfg);
        let report = analyze(&records, &schedules, &AnalyzeOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_series(&report, dir.path()).unwrap();
        for label in ["LOW", "HIGH"] {
            for stem in ["output_hist", "log_wage_kde", "whole_cent_hist"] {
                let path = dir.path().join(format!("{stem}_{label}.csv"));
                let text = std::fs::read_to_string(&path).unwrap();
                let header = text.lines().next().unwrap();
                match stem {
                    "output_hist" => assert_eq!(header, "y,count"),
                    "log_wage_kde" => assert_eq!(header, "log_wage_usd_per_hr,density"),
                    _ => assert_eq!(header, "cents,count"),
                }
                assert!(text.lines().count() > 1, "{path:?} should have data rows");
            }
        }
    }

    #[test]
    fn label_sanitization_keeps_filenames_safe() {
        assert_eq!(sanitize_label("HIGH"), "HIGH");
        assert_eq!(sanitize_label("low wage/2"), "low_wage_2");
        assert_eq!(sanitize_label(""), "_");
    }
}
