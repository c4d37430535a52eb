//! `piecework` — command-line interface over the piecework toolkit.
//!
//! Subcommands: `schedule`, `simulate`, `impute`, `calibrate`, `supply`,
//! `elasticity`, `focal-test`, `analyze`. Global flags `--seed`, `--output`,
//! and `--format` apply across subcommands; each subcommand falls back to
//! its natural format (tables as text, data as CSV, reports as JSON).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use piecework::{
    analyze, fit_lognormal, focal_point_test, impute_wage, point_elasticity, read_estimates,
    read_records, simulate_experiment, supply_fraction, write_estimates, write_json, write_records,
    AnalyzeOptions, EstimateRow, FocalOptions, PaymentSchedule, PopulationConfig, PwMode,
    SessionRecord, DEFAULT_CAP,
};

#[derive(Parser)]
#[command(
    name = "piecework",
    version,
    about = "Concave piece-rate schedules, worker simulation, and wage estimation"
)]
struct Cli {
    /// RNG seed override; only `simulate` draws random numbers.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Output format. Defaults per subcommand: `schedule` prints text,
    /// data subcommands print CSV, report subcommands print JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum PwModeArg {
    Set,
    Multiset,
}

impl From<PwModeArg> for PwMode {
    fn from(value: PwModeArg) -> Self {
        match value {
            PwModeArg::Set => PwMode::Set,
            PwModeArg::Multiset => PwMode::Multiset,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print a payment-schedule table: y, P(y), P(y)/Pbar, p(y+1), p(y+1)/Pbar.
    Schedule(ScheduleArgs),
    /// Generate a synthetic experiment from a population config.
    Simulate(SimulateArgs),
    /// Impute reservation wages from a session-record CSV.
    Impute(ImputeArgs),
    /// Fit a log-normal wage distribution to an estimate CSV.
    Calibrate(CalibrateArgs),
    /// Tabulate the predicted participating fraction over a wage grid.
    Supply(SupplyArgs),
    /// Tabulate the participation elasticity over a wage grid.
    Elasticity(ElasticityArgs),
    /// Run the whole-cent divisibility test on a session-record CSV.
    FocalTest(FocalTestArgs),
    /// Run the full analysis pipeline on a session-record CSV.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct ScheduleArgs {
    /// Asymptotic maximum earnings, cents.
    #[arg(long, value_name = "CENTS")]
    max_earnings: f64,
    /// Blocks at which cumulative earnings reach half the maximum.
    #[arg(long, value_name = "BLOCKS")]
    half_life: f64,
    /// Output cap, blocks.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u32,
    /// Fee folded into the first block's payment, cents.
    #[arg(long, default_value_t = 0.0)]
    show_up_fee: f64,
    /// Number of table rows after the zero row.
    #[arg(long, default_value_t = 30)]
    rows: u32,
}

#[derive(Args)]
struct SimulateArgs {
    /// Population config JSON.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Drop workers with y = 0 from the output, mimicking platforms where
    /// non-accepting workers are invisible.
    #[arg(long)]
    censor_nonstarters: bool,
}

/// Where a subcommand gets its payment schedule(s): a population config with
/// per-group schedules, or explicit schedule flags applied to every record.
#[derive(Args)]
struct ScheduleSource {
    /// Population config JSON providing each group's schedule.
    #[arg(long, value_name = "FILE", conflicts_with = "max_earnings")]
    config: Option<PathBuf>,
    /// Asymptotic maximum earnings, cents (with --half-life).
    #[arg(long, value_name = "CENTS", requires = "half_life")]
    max_earnings: Option<f64>,
    /// Blocks at which cumulative earnings reach half the maximum.
    #[arg(long, value_name = "BLOCKS", requires = "max_earnings")]
    half_life: Option<f64>,
    /// Output cap, blocks.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u32,
    /// Fee folded into the first block's payment, cents.
    #[arg(long, default_value_t = 0.0)]
    show_up_fee: f64,
}

enum Schedules {
    PerGroup(BTreeMap<String, PaymentSchedule>),
    Single(PaymentSchedule),
}

impl ScheduleSource {
    fn resolve(&self) -> Result<Schedules> {
        if let Some(path) = &self.config {
            let cfg = load_config(path)?;
            let map = cfg
                .groups
                .iter()
                .map(|g| Ok((g.label.clone(), g.schedule.build()?)))
                .collect::<Result<BTreeMap<_, _>>>()?;
            return Ok(Schedules::PerGroup(map));
        }
        match (self.max_earnings, self.half_life) {
            (Some(pbar), Some(hl)) => Ok(Schedules::Single(PaymentSchedule::new(
                pbar,
                hl,
                self.cap,
                self.show_up_fee,
            )?)),
            _ => bail!("provide either --config or --max-earnings with --half-life"),
        }
    }

    fn validation_map(&self, resolved: &Schedules) -> Option<BTreeMap<String, PaymentSchedule>> {
        match resolved {
            Schedules::PerGroup(map) => Some(map.clone()),
            Schedules::Single(_) => None,
        }
    }
}

#[derive(Args)]
struct ImputeArgs {
    /// Session-record CSV.
    input: PathBuf,
    #[command(flatten)]
    schedule: ScheduleSource,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Wage-estimate CSV (as produced by `impute`).
    input: PathBuf,
    /// Drop censored (at-cap) estimates before fitting.
    #[arg(long)]
    exclude_censored: bool,
    /// Quantile probabilities reported with the fit.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
    probs: Vec<f64>,
}

#[derive(Args)]
struct WageGrid {
    /// Mean of log wages ($/hr) of the fitted distribution.
    #[arg(long)]
    mu: f64,
    /// Standard deviation of log wages.
    #[arg(long)]
    sigma: f64,
    /// Lowest wage in the grid, $/hr.
    #[arg(long, default_value_t = 0.05)]
    min_wage: f64,
    /// Highest wage in the grid, $/hr.
    #[arg(long, default_value_t = 10.0)]
    max_wage: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 100)]
    points: u32,
    /// Space the grid geometrically instead of linearly.
    #[arg(long)]
    log_grid: bool,
}

impl WageGrid {
    fn build(&self) -> Result<Vec<f64>> {
        if !(self.min_wage.is_finite() && self.max_wage.is_finite()) || self.min_wage <= 0.0 {
            bail!("wage grid bounds must be finite and positive");
        }
        if self.min_wage >= self.max_wage {
            bail!(
                "--min-wage {} must be below --max-wage {}",
                self.min_wage,
                self.max_wage
            );
        }
        if self.points < 2 {
            bail!("--points must be at least 2");
        }
        let n = self.points as usize;
        let grid = (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                if self.log_grid {
                    self.min_wage * (self.max_wage / self.min_wage).powf(f)
                } else {
                    self.min_wage + f * (self.max_wage - self.min_wage)
                }
            })
            .collect();
        Ok(grid)
    }
}

#[derive(Args)]
struct SupplyArgs {
    #[command(flatten)]
    grid: WageGrid,
    /// Also report the expected number of participants out of this many
    /// workers.
    #[arg(long)]
    n_workers: Option<u32>,
}

#[derive(Args)]
struct ElasticityArgs {
    #[command(flatten)]
    grid: WageGrid,
}

#[derive(Args)]
struct FocalTestArgs {
    /// Session-record CSV.
    input: PathBuf,
    #[command(flatten)]
    schedule: ScheduleSource,
    /// Keep only records from this group.
    #[arg(long)]
    group: Option<String>,
    /// Divisibility modulus.
    #[arg(long, default_value_t = 5)]
    modulus: u32,
    /// Whether realizable whole-cent values are deduplicated.
    #[arg(long, value_enum, default_value_t = PwModeArg::Set)]
    pw_mode: PwModeArg,
    /// Upper end of the realizable range (default: largest observed output).
    #[arg(long)]
    max_y: Option<u32>,
    /// Drop the terminal whole-cent value from the realizable set.
    #[arg(long)]
    exclude_terminal: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Session-record CSV.
    input: PathBuf,
    /// Population config JSON providing each group's schedule.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Group coded 1 in the regressions (default: first group in the data).
    #[arg(long)]
    indicator: Option<String>,
    /// A worker quit early when y < this cutoff.
    #[arg(long, default_value_t = 10)]
    early_quit_cutoff: u32,
    /// Drop censored (at-cap) estimates from wage aggregates.
    #[arg(long)]
    exclude_censored: bool,
    /// Divisibility modulus for the per-group focal tests.
    #[arg(long, default_value_t = 5)]
    focal_modulus: u32,
    /// Whether realizable whole-cent values are deduplicated.
    #[arg(long, value_enum, default_value_t = PwModeArg::Set)]
    focal_mode: PwModeArg,
    /// Quantile probabilities for the calibration and wage table.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
    probs: Vec<f64>,
    /// Also write per-group figure series (histograms, KDE) into this
    /// directory.
    #[arg(long, value_name = "DIR")]
    series_dir: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let format = cli.format;
    let bytes = match cli.command {
        Command::Schedule(args) => run_schedule(
            &args,
            pick(
                format,
                Format::Text,
                &[Format::Text, Format::Csv, Format::Json],
                "schedule",
            )?,
        )?,
        Command::Simulate(args) => run_simulate(
            &args,
            cli.seed,
            pick(
                format,
                Format::Csv,
                &[Format::Csv, Format::Json],
                "simulate",
            )?,
        )?,
        Command::Impute(args) => run_impute(
            &args,
            pick(format, Format::Csv, &[Format::Csv, Format::Json], "impute")?,
        )?,
        Command::Calibrate(args) => run_calibrate(
            &args,
            pick(format, Format::Json, &[Format::Json], "calibrate")?,
        )?,
        Command::Supply(args) => run_supply(
            &args,
            pick(format, Format::Csv, &[Format::Csv, Format::Json], "supply")?,
        )?,
        Command::Elasticity(args) => run_elasticity(
            &args,
            pick(
                format,
                Format::Csv,
                &[Format::Csv, Format::Json],
                "elasticity",
            )?,
        )?,
        Command::FocalTest(args) => run_focal_test(
            &args,
            pick(format, Format::Json, &[Format::Json], "focal-test")?,
        )?,
        Command::Analyze(args) => run_analyze(
            &args,
            pick(format, Format::Json, &[Format::Json], "analyze")?,
        )?,
    };
    match &cli.output {
        Some(path) => {
            let mut file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            file.write_all(&bytes)?;
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(())
}

/// Resolves the effective format: the explicit flag if allowed for this
/// subcommand, otherwise the subcommand's natural default.
fn pick(
    requested: Option<Format>,
    default: Format,
    allowed: &[Format],
    name: &str,
) -> Result<Format> {
    match requested {
        None => Ok(default),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => bail!(
            "`{name}` does not support --format {}; supported: {}",
            format_name(f),
            allowed
                .iter()
                .map(|a| format_name(*a))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Text => "text",
    }
}

fn load_config(path: &Path) -> Result<PopulationConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    PopulationConfig::from_json(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn open_records(
    path: &Path,
    schedules: Option<&BTreeMap<String, PaymentSchedule>>,
) -> Result<Vec<SessionRecord>> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    read_records(file, schedules).with_context(|| format!("while parsing {}", path.display()))
}

/// One `schedule` table row: y, P(y), P(y)/Pbar, p(y+1), p(y+1)/Pbar.
type ScheduleRow = (u32, f64, f64, Option<f64>, Option<f64>);

fn run_schedule(args: &ScheduleArgs, format: Format) -> Result<Vec<u8>> {
    let s = PaymentSchedule::new(
        args.max_earnings,
        args.half_life,
        args.cap,
        args.show_up_fee,
    )?;
    let rows = args.rows.min(s.cap());
    let mut table: Vec<ScheduleRow> = Vec::new();
    for y in 0..=rows {
        let total = s.total_payment(y)?;
        let next = if y < s.cap() {
            Some(s.marginal_payment(y + 1)?)
        } else {
            None
        };
        table.push((y, total, total / s.pbar(), next, next.map(|p| p / s.pbar())));
    }
    let mut out = Vec::new();
    match format {
        Format::Text => {
            writeln!(
                out,
                "{:>6} {:>14} {:>14} {:>14} {:>14}",
                "y", "P(y)", "P(y)/Pbar", "p(y+1)", "p(y+1)/Pbar"
            )?;
            for (y, total, frac, next, next_frac) in &table {
                let next = next.map_or("-".to_string(), |v| format!("{v:.6}"));
                let next_frac = next_frac.map_or("-".to_string(), |v| format!("{v:.6}"));
                writeln!(
                    out,
                    "{y:>6} {total:>14.6} {frac:>14.6} {next:>14} {next_frac:>14}"
                )?;
            }
        }
        Format::Csv => {
            let mut w = csv_writer(&mut out);
            w.write_record([
                "y",
                "P_y_cents",
                "P_y_over_pbar",
                "p_next_cents",
                "p_next_over_pbar",
            ])?;
            for row in &table {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let value: Vec<serde_json::Value> = table
                .iter()
                .map(|(y, total, frac, next, next_frac)| {
                    serde_json::json!({
                        "y": y,
                        "P_y_cents": total,
                        "P_y_over_pbar": frac,
                        "p_next_cents": next,
                        "p_next_over_pbar": next_frac,
                    })
                })
                .collect();
            write_json(&mut out, &value)?;
        }
    }
    Ok(out)
}

fn run_simulate(args: &SimulateArgs, seed: Option<u64>, format: Format) -> Result<Vec<u8>> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let mut records = simulate_experiment(&cfg)?;
    if args.censor_nonstarters {
        let before = records.len();
        records.retain(|r| r.y > 0);
        eprintln!(
            "censored {} non-starters of {before} workers",
            before - records.len()
        );
    }
    let mut out = Vec::new();
    match format {
        Format::Csv => write_records(&mut out, &records)?,
        Format::Json => write_json(&mut out, &records)?,
        Format::Text => unreachable!("rejected by pick"),
    }
    Ok(out)
}

fn run_impute(args: &ImputeArgs, format: Format) -> Result<Vec<u8>> {
    let resolved = args.schedule.resolve()?;
    let validation = args.schedule.validation_map(&resolved);
    let records = open_records(&args.input, validation.as_ref())?;
    let mut rows: Vec<EstimateRow> = Vec::new();
    let mut skipped = 0usize;
    let mut censored = 0usize;
    for r in &records {
        if r.y == 0 {
            skipped += 1;
            continue;
        }
        let schedule = match &resolved {
            Schedules::Single(s) => s,
            Schedules::PerGroup(map) => &map[&r.group],
        };
        let est = impute_wage(schedule, r.y, r.t_bar)?;
        if est.censored {
            censored += 1;
        }
        rows.push(EstimateRow::new(r.worker_id, &est));
    }
    rows.sort_by_key(|r| r.worker_id);
    eprintln!(
        "imputed {} estimates ({skipped} non-starters skipped, {censored} censored at cap)",
        rows.len()
    );
    let mut out = Vec::new();
    match format {
        Format::Csv => write_estimates(&mut out, &rows)?,
        Format::Json => write_json(&mut out, &rows)?,
        Format::Text => unreachable!("rejected by pick"),
    }
    Ok(out)
}

fn run_calibrate(args: &CalibrateArgs, _format: Format) -> Result<Vec<u8>> {
    let file =
        File::open(&args.input).with_context(|| format!("cannot read {}", args.input.display()))?;
    let mut rows = read_estimates(file)?;
    if args.exclude_censored {
        rows.retain(|r| !r.censored);
    }
    let wages: Vec<f64> = rows.iter().map(|r| r.omega_usd_per_hr).collect();
    let fit = fit_lognormal(&wages, &args.probs)?;
    let mut out = Vec::new();
    write_json(&mut out, &fit)?;
    Ok(out)
}

fn run_supply(args: &SupplyArgs, format: Format) -> Result<Vec<u8>> {
    let grid = args.grid.build()?;
    let mut out = Vec::new();
    match format {
        Format::Csv => {
            let mut w = csv_writer(&mut out);
            if args.n_workers.is_some() {
                w.write_record([
                    "wage_usd_per_hr",
                    "participating_fraction",
                    "expected_workers",
                ])?;
            } else {
                w.write_record(["wage_usd_per_hr", "participating_fraction"])?;
            }
            for wage in &grid {
                let frac = supply_fraction(args.grid.mu, args.grid.sigma, *wage)?;
                match args.n_workers {
                    Some(n) => w.serialize((wage, frac, frac * n as f64))?,
                    None => w.serialize((wage, frac))?,
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Result<Vec<serde_json::Value>> = grid
                .iter()
                .map(|wage| {
                    let frac = supply_fraction(args.grid.mu, args.grid.sigma, *wage)?;
                    let mut row = serde_json::json!({
                        "wage_usd_per_hr": wage,
                        "participating_fraction": frac,
                    });
                    if let Some(n) = args.n_workers {
                        row["expected_workers"] = serde_json::json!(frac * n as f64);
                    }
                    Ok(row)
                })
                .collect();
            write_json(&mut out, &rows?)?;
        }
        Format::Text => unreachable!("rejected by pick"),
    }
    Ok(out)
}

fn run_elasticity(args: &ElasticityArgs, format: Format) -> Result<Vec<u8>> {
    let grid = args.grid.build()?;
    let mut out = Vec::new();
    match format {
        Format::Csv => {
            let mut w = csv_writer(&mut out);
            w.write_record(["wage_usd_per_hr", "elasticity"])?;
            for wage in &grid {
                let e = point_elasticity(args.grid.mu, args.grid.sigma, *wage)?;
                w.serialize((wage, e))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Result<Vec<serde_json::Value>> = grid
                .iter()
                .map(|wage| {
                    let e = point_elasticity(args.grid.mu, args.grid.sigma, *wage)?;
                    Ok(serde_json::json!({"wage_usd_per_hr": wage, "elasticity": e}))
                })
                .collect();
            write_json(&mut out, &rows?)?;
        }
        Format::Text => unreachable!("rejected by pick"),
    }
    Ok(out)
}

fn run_focal_test(args: &FocalTestArgs, _format: Format) -> Result<Vec<u8>> {
    let resolved = args.schedule.resolve()?;
    let validation = args.schedule.validation_map(&resolved);
    let mut records = open_records(&args.input, validation.as_ref())?;
    if let Some(group) = &args.group {
        records.retain(|r| &r.group == group);
        if records.is_empty() {
            bail!("no records in group `{group}`");
        }
    }
    let mut groups: Vec<&str> = Vec::new();
    for r in &records {
        if !groups.contains(&r.group.as_str()) {
            groups.push(&r.group);
        }
    }
    if groups.len() > 1 {
        bail!(
            "records span {} groups ({}); pass --group to pick one",
            groups.len(),
            groups.join(", ")
        );
    }
    let schedule = match &resolved {
        Schedules::Single(s) => s.clone(),
        Schedules::PerGroup(map) => map
            .get(groups[0])
            .with_context(|| format!("no schedule for group `{}`", groups[0]))?
            .clone(),
    };
    let outputs: Vec<u32> = records.iter().filter(|r| r.y >= 1).map(|r| r.y).collect();
    let skipped = records.len() - outputs.len();
    if skipped > 0 {
        eprintln!("skipped {skipped} non-starters");
    }
    let opts = FocalOptions {
        mode: args.pw_mode.into(),
        max_y: args.max_y,
        exclude_terminal: args.exclude_terminal,
    };
    let result = focal_point_test(&outputs, &schedule, args.modulus, &opts)?;
    let mut out = Vec::new();
    write_json(&mut out, &result)?;
    Ok(out)
}

fn run_analyze(args: &AnalyzeArgs, _format: Format) -> Result<Vec<u8>> {
    let cfg = load_config(&args.config)?;
    let schedules = cfg
        .groups
        .iter()
        .map(|g| Ok((g.label.clone(), g.schedule.build()?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let records = open_records(&args.input, Some(&schedules))?;
    let options = AnalyzeOptions {
        early_quit_cutoff: args.early_quit_cutoff,
        indicator_group: args.indicator.clone(),
        include_censored: !args.exclude_censored,
        focal_modulus: args.focal_modulus,
        focal_mode: args.focal_mode.into(),
        quantile_probs: args.probs.clone(),
    };
    let report = analyze(&records, &schedules, &options)?;
    if let Some(dir) = &args.series_dir {
        piecework::emit_series(&report, dir)?;
        eprintln!("wrote figure series to {}", dir.display());
    }
    let mut out = Vec::new();
    write_json(&mut out, &report)?;
    Ok(out)
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::Writer::from_writer(writer)
}
