//! Seeded synthetic-experiment generator.
//!
//! Draws a population of workers — a `rho` mixture of target earners over
//! rational workers with log-normal reservation wages — runs each against
//! its group's payment schedule, and emits one session record per worker.
//! Every worker gets an independent, reproducible RNG substream derived from
//! the master seed and the worker index, so results are byte-identical for a
//! given config regardless of evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedIndex;
use rand_distr::{Binomial, Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::agents::{rational_output, target_output, WorkerProfile};
use crate::error::{Error, Result};
use crate::schedule::PaymentSchedule;

/// Minimum block time, seconds; truncated-normal draws are resampled below it.
pub const MIN_BLOCK_TIME: f64 = 0.5;

/// Chance that a block is recorded as a miss when generating the cosmetic
/// per-session miss count.
const MISS_RATE: f64 = 0.03;

fn default_cap() -> u32 {
    crate::schedule::DEFAULT_CAP
}

/// Payment-schedule parameters as they appear in a config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleConfig {
    /// Asymptotic maximum earnings, cents.
    pub pbar: f64,
    /// Half-life, blocks.
    pub half_life: f64,
    /// Output cap, blocks.
    #[serde(default = "default_cap")]
    pub cap: u32,
    /// Fee folded into the first block's payment, cents.
    #[serde(default)]
    pub show_up_fee: f64,
}

impl ScheduleConfig {
    /// Validates and builds the schedule.
    pub fn build(&self) -> Result<PaymentSchedule> {
        PaymentSchedule::new(self.pbar, self.half_life, self.cap, self.show_up_fee)
    }
}

/// One experimental group: a schedule plus worker-timing parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupConfig {
    /// Group label (must be unique across groups).
    pub label: String,
    /// Number of workers to draw.
    pub n_workers: u32,
    /// Payment schedule for this group.
    pub schedule: ScheduleConfig,
    /// Mean block time, seconds.
    pub block_time_mean: f64,
    /// Block-time standard deviation, seconds; defaults to 20% of the mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_time_sd: Option<f64>,
    /// Earnings-target distribution for this group's target earners, as
    /// `[target_cents, weight]` pairs; defaults to a 75/25 split between the
    /// multiples of 5 below the schedule's whole-cent maximum and the
    /// maximum itself.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_weights: Option<Vec<(u64, f64)>>,
}

/// Full synthetic-population configuration. Serializes to/from a JSON
/// document with exactly these field names.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PopulationConfig {
    /// Mean of log reservation wages, log dollars/hour.
    pub mu: f64,
    /// Standard deviation of log reservation wages.
    pub sigma: f64,
    /// Fraction of target earners in the population.
    pub rho: f64,
    /// Master seed; every worker's RNG substream derives from it.
    #[serde(default)]
    pub seed: u64,
    /// Experimental groups.
    pub groups: Vec<GroupConfig>,
}

impl PopulationConfig {
    /// Parses a JSON config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PopulationConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks all fields for internal consistency.
    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(Error::Config("mu must be finite".to_string()));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::Config(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if self.groups.is_empty() {
            return Err(Error::Config("at least one group is required".to_string()));
        }
        let mut labels = std::collections::BTreeSet::new();
        for g in &self.groups {
            if g.label.is_empty() {
                return Err(Error::Config("group label must be non-empty".to_string()));
            }
            if !labels.insert(g.label.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate group label `{}`",
                    g.label
                )));
            }
            if g.n_workers == 0 {
                return Err(Error::Config(format!("group `{}` has no workers", g.label)));
            }
            g.schedule
                .build()
                .map_err(|e| Error::Config(format!("group `{}`: {e}", g.label)))?;
            if !g.block_time_mean.is_finite() || g.block_time_mean < MIN_BLOCK_TIME {
                return Err(Error::Config(format!(
                    "group `{}`: block_time_mean must be at least {MIN_BLOCK_TIME} s",
                    g.label
                )));
            }
            if let Some(sd) = g.block_time_sd {
                if !sd.is_finite() || sd < 0.0 {
                    return Err(Error::Config(format!(
                        "group `{}`: block_time_sd must be non-negative",
                        g.label
                    )));
                }
            }
            let weights = match &g.target_weights {
                Some(w) => w.clone(),
                None => default_target_weights(g.schedule.pbar),
            };
            if weights.is_empty() {
                return Err(Error::Config(format!(
                    "group `{}`: empty target distribution",
                    g.label
                )));
            }
            if weights.iter().any(|(_, w)| !w.is_finite() || *w < 0.0)
                || weights.iter().map(|(_, w)| w).sum::<f64>() <= 0.0
            {
                return Err(Error::Config(format!(
                    "group `{}`: target weights must be non-negative and sum to > 0",
                    g.label
                )));
            }
        }
        Ok(())
    }
}

/// Default earnings-target distribution for a schedule topping out at `pbar`
/// cents: 75% of the mass spread evenly over the multiples of 5 strictly
/// below `floor(pbar)`, 25% on `floor(pbar)` itself (workers chasing the
/// full amount). If no multiple of 5 fits below, all mass sits on the
/// full amount.
pub fn default_target_weights(pbar: f64) -> Vec<(u64, f64)> {
    let full = pbar.max(0.0).floor() as u64;
    if full == 0 {
        return Vec::new();
    }
    let fives: Vec<u64> = (1..).map(|i| 5 * i).take_while(|&t| t < full).collect();
    if fives.is_empty() {
        return vec![(full, 1.0)];
    }
    let each = 0.75 / fives.len() as f64;
    let mut weights: Vec<(u64, f64)> = fives.into_iter().map(|t| (t, each)).collect();
    weights.push((full, 0.25));
    weights
}

/// One worker's observed session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    /// Stable worker identifier, unique within a simulated experiment.
    pub worker_id: u64,
    /// Group label.
    pub group: String,
    /// Blocks completed.
    pub y: u32,
    /// Mean block time, seconds.
    #[serde(rename = "t_bar_s")]
    pub t_bar: f64,
    /// Cumulative earnings at `y`, cents (exact schedule value).
    #[serde(rename = "earnings_cents")]
    pub earnings: f64,
    /// Number of missed clicks recorded for the session (cosmetic).
    pub misses: u32,
}

fn draw_block_time(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> Result<f64> {
    if sd == 0.0 {
        return Ok(mean);
    }
    let normal = Normal::new(mean, sd)
        .map_err(|e| Error::Config(format!("block time distribution: {e}")))?;
    // Truncated normal via resampling; the truncation point is far in the
    // tail for realistic parameters, so this terminates almost immediately.
    loop {
        let draw = normal.sample(rng);
        if draw >= MIN_BLOCK_TIME {
            return Ok(draw);
        }
    }
}

/// Simulates the configured experiment, returning one record per worker in
/// worker-id order. Deterministic in `config` (including its seed).
pub fn simulate_experiment(config: &PopulationConfig) -> Result<Vec<SessionRecord>> {
    config.validate()?;
    let wage_dist = LogNormal::new(config.mu, config.sigma)
        .map_err(|e| Error::Config(format!("wage distribution: {e}")))?;
    let mut records = Vec::new();
    let mut worker_id: u64 = 0;
    for group in &config.groups {
        let schedule = group.schedule.build()?;
        let weights = group
            .target_weights
            .clone()
            .unwrap_or_else(|| default_target_weights(group.schedule.pbar));
        let target_dist = WeightedIndex::new(weights.iter().map(|(_, w)| *w))
            .map_err(|e| Error::Config(format!("target weights: {e}")))?;
        let sd = group.block_time_sd.unwrap_or(0.2 * group.block_time_mean);
        for _ in 0..group.n_workers {
            // Independent substream per worker: same master seed, distinct
            // stream index, so the draw sequence of one worker never shifts
            // another's.
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(worker_id.wrapping_add(1));

            let omega_usd_hr = wage_dist.sample(&mut rng);
            let omega_cents_s = omega_usd_hr / 36.0;
            let t_bar = draw_block_time(&mut rng, group.block_time_mean, sd)?;
            let is_target = rng.random::<f64>() < config.rho;
            let choice = if is_target {
                let target = weights[target_dist.sample(&mut rng)].0;
                target_output(&schedule, &WorkerProfile::target_earner(target, t_bar))?
            } else {
                rational_output(&schedule, &WorkerProfile::rational(omega_cents_s, t_bar))?
            };
            let misses = Binomial::new(10 * choice.y as u64, MISS_RATE)
                .map_err(|e| Error::Config(format!("miss distribution: {e}")))?
                .sample(&mut rng) as u32;
            records.push(SessionRecord {
                worker_id,
                group: group.label.clone(),
                y: choice.y,
                t_bar,
                earnings: choice.earnings,
                misses,
            });
            worker_id += 1;
        }
    }
    Ok(records)
}
