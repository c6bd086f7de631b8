//! Batch campaigns: repeated daily-horizon solves across date ranges,
//! devices, locations and modes, with state-of-charge carry-over and
//! deterministic aggregation.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::device::{self, DeviceSpec};
use crate::ingest::{self, CsvSchema, IngestError, PriceSeries, PriceStore};
use crate::lp::LpStatus;
use crate::market::{
    solve_horizon, HorizonProblem, Mode, RegulationParams, TerminalPolicy,
};

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("config error: {0}")]
    Config(String),
    #[error("no price data for location {0:?}")]
    MissingLocation(String),
    #[error("price coverage gaps: {}", .0.join(", "))]
    Coverage(Vec<String>),
    #[error("no records for year {0}")]
    MissingYear(i32),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("io error: {0}")]
    Io(String),
}

/// How the initial state of charge of day `d+1` relates to day `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SocPolicy {
    /// Day `d+1` starts at day `d`'s terminal state (per device, location
    /// and mode stream). The default: consecutive daily problems chain
    /// without inventing terminal constraints.
    #[default]
    CarryOver,
    /// Every day starts from the device's configured initial state.
    Independent,
}

impl std::str::FromStr for SocPolicy {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "carry-over" | "carryover" => Ok(SocPolicy::CarryOver),
            "independent" => Ok(SocPolicy::Independent),
            other => Err(CampaignError::Config(format!(
                "unknown soc policy {other:?}; expected carry-over or independent"
            ))),
        }
    }
}

/// A device reference: either a preset label or an inline spec, with an
/// optional starting state override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub spec: Option<DeviceSpec>,
    #[serde(default)]
    pub initial_soc_mwh: Option<f64>,
}

impl DeviceConfig {
    pub fn resolve(&self) -> Result<DeviceSpec, CampaignError> {
        let mut spec = match (&self.preset, &self.spec) {
            (Some(name), None) => {
                device::preset_by_name(name).map_err(|e| CampaignError::Config(e.to_string()))?
            }
            (None, Some(spec)) => spec.clone(),
            (Some(_), Some(_)) => {
                return Err(CampaignError::Config(
                    "device entry has both a preset and an inline spec".into(),
                ))
            }
            (None, None) => {
                return Err(CampaignError::Config(
                    "device entry needs a preset or an inline spec".into(),
                ))
            }
        };
        if let Some(soc) = self.initial_soc_mwh {
            spec.initial_soc_mwh = soc;
        }
        let report = device::validate(&spec);
        if !report.is_valid() {
            return Err(CampaignError::Config(format!(
                "device {}: {}",
                spec.name,
                report.violations.join("; ")
            )));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocationConfig {
    pub name: String,
    /// Path of the price CSV backing this location.
    pub prices: String,
    #[serde(default)]
    pub schema: Option<CsvSchema>,
}

/// Uniform regulation settings, applied to every step of every day unless a
/// per-day override file is given (CSV columns: `date`, `reg_up_fraction`,
/// `reg_down_fraction`, `performance_score`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegulationConfig {
    pub reg_up_fraction: f64,
    pub reg_down_fraction: f64,
    pub performance_score: f64,
    pub penalty_factor: f64,
    pub overrides: Option<String>,
}

impl Default for RegulationConfig {
    fn default() -> Self {
        RegulationConfig {
            reg_up_fraction: 0.1,
            reg_down_fraction: 0.1,
            performance_score: 0.95,
            penalty_factor: RegulationParams::DEFAULT_PENALTY_FACTOR,
            overrides: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub start: NaiveDate,
    /// Inclusive end date.
    pub end: NaiveDate,
    pub devices: Vec<DeviceConfig>,
    pub locations: Vec<LocationConfig>,
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub soc_policy: SocPolicy,
    #[serde(default = "default_horizon")]
    pub horizon_hours: f64,
    #[serde(default = "default_dt")]
    pub dt_hours: f64,
    #[serde(default)]
    pub discount_rate: f64,
    #[serde(default)]
    pub terminal_policy: TerminalPolicy,
    #[serde(default)]
    pub regulation: RegulationConfig,
    /// Worker threads for stream-level parallelism; default = all cores.
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_horizon() -> f64 {
    24.0
}

fn default_dt() -> f64 {
    1.0
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.devices.is_empty() {
            return Err(CampaignError::Config("device list is empty".into()));
        }
        if self.locations.is_empty() {
            return Err(CampaignError::Config("location list is empty".into()));
        }
        if self.modes.is_empty() {
            return Err(CampaignError::Config("mode list is empty".into()));
        }
        if self.end < self.start {
            return Err(CampaignError::Config(format!(
                "date range {}..{} is empty",
                self.start, self.end
            )));
        }
        if !(self.horizon_hours > 0.0 && self.horizon_hours <= 24.0) {
            return Err(CampaignError::Config(format!(
                "horizon {} h must be in (0, 24]",
                self.horizon_hours
            )));
        }
        let steps = self.horizon_hours / self.dt_hours;
        if self.dt_hours <= 0.0 || (steps - steps.round()).abs() > 1e-9 {
            return Err(CampaignError::Config(format!(
                "step {} h does not divide the {} h horizon",
                self.dt_hours, self.horizon_hours
            )));
        }
        Ok(())
    }

    fn steps_per_horizon(&self) -> usize {
        (self.horizon_hours / self.dt_hours).round() as usize
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        let mut out = Vec::new();
        let mut d = self.start;
        while d <= self.end {
            out.push(d);
            d += Duration::days(1);
        }
        out
    }
}

/// Solve status of one campaign day.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Error(String),
}

impl RunStatus {
    pub fn is_optimal(&self) -> bool {
        matches!(self, RunStatus::Optimal)
    }

    fn label(&self) -> &str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Unbounded => "unbounded",
            RunStatus::Error(_) => "error",
        }
    }
}

/// One (date, device, location, mode) solve.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub date: NaiveDate,
    pub device: String,
    pub location: String,
    pub mode: Mode,
    pub status: RunStatus,
    pub r_arb: f64,
    pub r_reg: f64,
    pub total: f64,
    pub soc_start: f64,
    pub soc_end: f64,
}

#[derive(Debug, Clone, Default)]
pub struct CampaignResult {
    /// Exactly one record per (date, device, location, mode), in key order.
    pub records: Vec<RunRecord>,
    /// Human-readable notes for non-optimal days.
    pub failures: Vec<String>,
}

impl CampaignResult {
    pub fn solved(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| r.status.is_optimal())
    }
}

type RegOverrides = BTreeMap<NaiveDate, (f64, f64, f64)>;

fn load_reg_overrides(path: &str) -> Result<RegOverrides, CampaignError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CampaignError::Io(format!("regulation overrides {path}: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| CampaignError::Io(e.to_string()))?
        .clone();
    let idx = |name: &str| -> Result<usize, CampaignError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CampaignError::Config(format!("overrides file lacks column {name:?}")))
    };
    let (di, ui, wi, pi) = (
        idx("date")?,
        idx("reg_up_fraction")?,
        idx("reg_down_fraction")?,
        idx("performance_score")?,
    );
    let mut out = RegOverrides::new();
    for record in reader.records() {
        let record = record.map_err(|e| CampaignError::Io(e.to_string()))?;
        let date = record[di]
            .parse::<NaiveDate>()
            .map_err(|e| CampaignError::Config(format!("overrides date: {e}")))?;
        let num = |i: usize| -> Result<f64, CampaignError> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| CampaignError::Config(format!("overrides value {:?}", &record[i])))
        };
        out.insert(date, (num(ui)?, num(wi)?, num(pi)?));
    }
    Ok(out)
}

struct Prepared {
    devices: Vec<DeviceSpec>,
    series: BTreeMap<String, PriceSeries>,
    overrides: RegOverrides,
}

fn prepare(config: &CampaignConfig, store: &PriceStore) -> Result<Prepared, CampaignError> {
    config.validate()?;
    let devices: Vec<DeviceSpec> = config
        .devices
        .iter()
        .map(|d| d.resolve())
        .collect::<Result<_, _>>()?;

    let mut series = BTreeMap::new();
    let mut gaps = Vec::new();
    // The step must divide a day evenly so that date-based slicing works.
    ingest::steps_per_day(config.dt_hours)?;
    let window = config.steps_per_horizon();
    for loc in &config.locations {
        let raw = store
            .get(&loc.name)
            .ok_or_else(|| CampaignError::MissingLocation(loc.name.clone()))?;
        let resampled = ingest::resample(raw, config.dt_hours)?;
        if config.modes.contains(&Mode::Joint) && resampled.rcp.is_none() {
            return Err(CampaignError::Config(format!(
                "regulation capacity price required for location {:?} in joint mode",
                loc.name
            )));
        }
        for date in config.dates() {
            match day_window(&resampled, date, window) {
                Some(_) => {}
                None => gaps.push(format!("{}: {date}", loc.name)),
            }
        }
        series.insert(loc.name.clone(), resampled);
    }
    if !gaps.is_empty() {
        return Err(CampaignError::Coverage(gaps));
    }

    let overrides = match &config.regulation.overrides {
        Some(path) => load_reg_overrides(path)?,
        None => RegOverrides::new(),
    };
    Ok(Prepared {
        devices,
        series,
        overrides,
    })
}

fn day_window(series: &PriceSeries, date: NaiveDate, window: usize) -> Option<usize> {
    let start = series.index_of(date.and_hms_opt(0, 0, 0).unwrap())?;
    if start + window <= series.len() {
        Some(start)
    } else {
        None
    }
}

/// Runs the full campaign. Every (date, device, location, mode) tuple gets
/// exactly one record; failed days are logged, not fatal. Records come back
/// in deterministic key order regardless of the worker count.
pub fn run(config: &CampaignConfig, store: &PriceStore) -> Result<CampaignResult, CampaignError> {
    let prepared = prepare(config, store)?;
    match config.workers {
        Some(w) if w > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CampaignError::Config(e.to_string()))?;
            pool.install(|| Ok(run_streams(config, &prepared)))
        }
        _ => Ok(run_streams(config, &prepared)),
    }
}

fn run_streams(config: &CampaignConfig, prepared: &Prepared) -> CampaignResult {
    // One stream per (device, location, mode); carry-over chains inside a
    // stream, streams are independent of each other.
    let mut streams = Vec::new();
    for device in &prepared.devices {
        for loc in &config.locations {
            for &mode in &config.modes {
                streams.push((device, loc.name.as_str(), mode));
            }
        }
    }
    let per_stream: Vec<Vec<RunRecord>> = streams
        .par_iter()
        .map(|&(device, location, mode)| run_stream(config, prepared, device, location, mode))
        .collect();

    let mut records: Vec<RunRecord> = per_stream.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (&a.device, &a.location, a.mode, a.date).cmp(&(&b.device, &b.location, b.mode, b.date))
    });
    let failures = records
        .iter()
        .filter(|r| !r.status.is_optimal())
        .map(|r| {
            format!(
                "{} {} {} {}: {}",
                r.date,
                r.device,
                r.location,
                r.mode,
                match &r.status {
                    RunStatus::Error(msg) => msg.clone(),
                    other => other.label().to_string(),
                }
            )
        })
        .collect();
    CampaignResult { records, failures }
}

fn run_stream(
    config: &CampaignConfig,
    prepared: &Prepared,
    device: &DeviceSpec,
    location: &str,
    mode: Mode,
) -> Vec<RunRecord> {
    let series = &prepared.series[location];
    let window = config.steps_per_horizon();
    let mut soc = device.initial_soc_mwh;
    let mut records = Vec::new();
    for date in config.dates() {
        let start = day_window(series, date, window).expect("coverage checked");
        let prices = series.window(start, window);
        let mut day_device = device.clone();
        day_device.initial_soc_mwh = soc;
        let mut hp = HorizonProblem::new(day_device, prices, mode);
        hp.dt_hours = config.dt_hours;
        hp.discount_rate = config.discount_rate;
        hp.terminal_policy = config.terminal_policy;
        if mode == Mode::Joint {
            let reg = &config.regulation;
            let (up, down, score) = prepared
                .overrides
                .get(&date)
                .copied()
                .unwrap_or((reg.reg_up_fraction, reg.reg_down_fraction, reg.performance_score));
            let mut params = RegulationParams::uniform(window, up, down, score);
            params.penalty_factor = reg.penalty_factor;
            hp.regulation = Some(params);
        }

        let soc_start = soc;
        let record = match solve_horizon(&hp) {
            Ok(outcome) => match outcome.solution.status {
                LpStatus::Optimal => {
                    let schedule = outcome.schedule.expect("optimal");
                    let report = outcome.report.expect("optimal");
                    let soc_end = *schedule.soc_mwh.last().unwrap();
                    RunRecord {
                        date,
                        device: device.name.clone(),
                        location: location.to_string(),
                        mode,
                        status: RunStatus::Optimal,
                        r_arb: report.r_arb,
                        r_reg: report.r_reg,
                        total: report.total_discounted,
                        soc_start,
                        soc_end,
                    }
                }
                other => RunRecord {
                    date,
                    device: device.name.clone(),
                    location: location.to_string(),
                    mode,
                    status: if other == LpStatus::Infeasible {
                        RunStatus::Infeasible
                    } else {
                        RunStatus::Unbounded
                    },
                    r_arb: 0.0,
                    r_reg: 0.0,
                    total: 0.0,
                    soc_start,
                    soc_end: soc_start,
                },
            },
            Err(e) => RunRecord {
                date,
                device: device.name.clone(),
                location: location.to_string(),
                mode,
                status: RunStatus::Error(e.to_string()),
                r_arb: 0.0,
                r_reg: 0.0,
                total: 0.0,
                soc_start,
                soc_end: soc_start,
            },
        };
        soc = match (config.soc_policy, &record.status) {
            (SocPolicy::CarryOver, RunStatus::Optimal) => record.soc_end,
            (SocPolicy::CarryOver, _) => device.initial_soc_mwh,
            (SocPolicy::Independent, _) => device.initial_soc_mwh,
        };
        records.push(record);
    }
    records
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Monthly,
    Annual,
}

impl std::str::FromStr for Grouping {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monthly" => Ok(Grouping::Monthly),
            "annual" => Ok(Grouping::Annual),
            other => Err(CampaignError::Config(format!(
                "unknown grouping {other:?}; expected monthly or annual"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Mean,
    Sum,
}

impl std::str::FromStr for Statistic {
    type Err = CampaignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mean" => Ok(Statistic::Mean),
            "sum" => Ok(Statistic::Sum),
            other => Err(CampaignError::Config(format!(
                "unknown statistic {other:?}; expected mean or sum"
            ))),
        }
    }
}

/// One row of an aggregate table.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub device: String,
    pub location: String,
    pub mode: Mode,
    /// `YYYY` or `YYYY-MM`.
    pub period: String,
    /// Solved days contributing to the group.
    pub days: usize,
    pub r_arb: f64,
    pub r_reg: f64,
    pub total: f64,
}

/// Groups solved records by period and reduces them with the statistic.
/// Only optimal days contribute; empty groups are omitted rather than
/// reported as zero. Rows come out in stable key order.
pub fn aggregate(result: &CampaignResult, grouping: Grouping, statistic: Statistic) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(String, String, Mode, String), (usize, f64, f64, f64)> =
        BTreeMap::new();
    for r in result.solved() {
        let period = match grouping {
            Grouping::Annual => format!("{:04}", r.date.year()),
            Grouping::Monthly => format!("{:04}-{:02}", r.date.year(), r.date.month()),
        };
        let entry = groups
            .entry((r.device.clone(), r.location.clone(), r.mode, period))
            .or_insert((0, 0.0, 0.0, 0.0));
        entry.0 += 1;
        entry.1 += r.r_arb;
        entry.2 += r.r_reg;
        entry.3 += r.total;
    }
    groups
        .into_iter()
        .map(|((device, location, mode, period), (days, r_arb, r_reg, total))| {
            let scale = match statistic {
                Statistic::Sum => 1.0,
                Statistic::Mean => 1.0 / days as f64,
            };
            AggregateRow {
                device,
                location,
                mode,
                period,
                days,
                r_arb: r_arb * scale,
                r_reg: r_reg * scale,
                total: total * scale,
            }
        })
        .collect()
}

/// Year-over-year percentage change, or `Undefined` when the base year's
/// revenue is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YoyValue {
    Pct(f64),
    Undefined,
}

impl std::fmt::Display for YoyValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            YoyValue::Pct(v) => write!(f, "{v}"),
            YoyValue::Undefined => f.write_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YoyRow {
    pub device: String,
    pub location: String,
    pub mode: Mode,
    pub year_a: i32,
    pub year_b: i32,
    pub revenue_a: f64,
    pub revenue_b: f64,
    pub delta: YoyValue,
}

/// Percentage revenue change from `year_a` to `year_b` per (device,
/// location, mode), based on annual totals of solved days.
pub fn yoy_delta(
    result: &CampaignResult,
    year_a: i32,
    year_b: i32,
) -> Result<Vec<YoyRow>, CampaignError> {
    let mut totals: BTreeMap<(String, String, Mode), (f64, f64)> = BTreeMap::new();
    let mut seen_a = false;
    let mut seen_b = false;
    for r in result.solved() {
        let year = r.date.year();
        if year == year_a || year == year_b {
            let entry = totals
                .entry((r.device.clone(), r.location.clone(), r.mode))
                .or_insert((0.0, 0.0));
            if year == year_a {
                entry.0 += r.total;
                seen_a = true;
            } else {
                entry.1 += r.total;
                seen_b = true;
            }
        }
    }
    if !seen_a {
        return Err(CampaignError::MissingYear(year_a));
    }
    if !seen_b {
        return Err(CampaignError::MissingYear(year_b));
    }
    Ok(totals
        .into_iter()
        .map(|((device, location, mode), (a, b))| YoyRow {
            device,
            location,
            mode,
            year_a,
            year_b,
            revenue_a: a,
            revenue_b: b,
            delta: if a == 0.0 {
                YoyValue::Undefined
            } else {
                YoyValue::Pct(100.0 * (b - a) / a)
            },
        })
        .collect())
}

const RECORD_HEADER: [&str; 10] = [
    "date", "device", "location", "mode", "status", "r_arb", "r_reg", "total", "soc_start",
    "soc_end",
];

/// Writes the per-day records. Output is byte-deterministic for a given
/// result.
pub fn write_records_csv(path: impl AsRef<Path>, result: &CampaignResult) -> Result<(), CampaignError> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(|e| CampaignError::Io(e.to_string()))?;
    w.write_record(RECORD_HEADER)
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    for r in &result.records {
        w.write_record([
            r.date.to_string(),
            r.device.clone(),
            r.location.clone(),
            r.mode.to_string(),
            r.status.label().to_string(),
            r.r_arb.to_string(),
            r.r_reg.to_string(),
            r.total.to_string(),
            r.soc_start.to_string(),
            r.soc_end.to_string(),
        ])
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CampaignError::Io(e.to_string()))?;
    Ok(())
}

/// Reads a records CSV back, enforcing one record per key tuple.
pub fn load_records_csv(path: impl AsRef<Path>) -> Result<CampaignResult, CampaignError> {
    let mut reader =
        csv::Reader::from_path(path.as_ref()).map_err(|e| CampaignError::Io(e.to_string()))?;
    let mut records = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| CampaignError::Io(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CampaignError> {
            record[i]
                .parse()
                .map_err(|_| CampaignError::Config(format!("bad number {:?}", &record[i])))
        };
        let r = RunRecord {
            date: record[0]
                .parse()
                .map_err(|e| CampaignError::Config(format!("bad date: {e}")))?,
            device: record[1].to_string(),
            location: record[2].to_string(),
            mode: record[3]
                .parse()
                .map_err(|e: crate::market::ModelError| CampaignError::Config(e.to_string()))?,
            status: match &record[4] {
                "optimal" => RunStatus::Optimal,
                "infeasible" => RunStatus::Infeasible,
                "unbounded" => RunStatus::Unbounded,
                other => RunStatus::Error(other.to_string()),
            },
            r_arb: num(5)?,
            r_reg: num(6)?,
            total: num(7)?,
            soc_start: num(8)?,
            soc_end: num(9)?,
        };
        if !seen.insert((r.date, r.device.clone(), r.location.clone(), r.mode)) {
            return Err(CampaignError::Config(format!(
                "duplicate record for {} {} {} {}",
                r.date, r.device, r.location, r.mode
            )));
        }
        records.push(r);
    }
    Ok(CampaignResult {
        records,
        failures: Vec::new(),
    })
}

pub fn write_aggregate_csv(path: impl AsRef<Path>, rows: &[AggregateRow]) -> Result<(), CampaignError> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(|e| CampaignError::Io(e.to_string()))?;
    w.write_record(["device", "location", "mode", "period", "days", "r_arb", "r_reg", "total"])
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.device.clone(),
            r.location.clone(),
            r.mode.to_string(),
            r.period.clone(),
            r.days.to_string(),
            r.r_arb.to_string(),
            r.r_reg.to_string(),
            r.total.to_string(),
        ])
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CampaignError::Io(e.to_string()))?;
    Ok(())
}

pub fn write_yoy_csv(path: impl AsRef<Path>, rows: &[YoyRow]) -> Result<(), CampaignError> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(|e| CampaignError::Io(e.to_string()))?;
    w.write_record(["device", "location", "mode", "year_a", "year_b", "revenue_a", "revenue_b", "delta_pct"])
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.device.clone(),
            r.location.clone(),
            r.mode.to_string(),
            r.year_a.to_string(),
            r.year_b.to_string(),
            r.revenue_a.to_string(),
            r.revenue_b.to_string(),
            r.delta.to_string(),
        ])
        .map_err(|e| CampaignError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CampaignError::Io(e.to_string()))?;
    Ok(())
}

/// Reproducibility manifest: the fully-resolved config plus fingerprints of
/// every input file. Re-running with an identical manifest reproduces the
/// records byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: CampaignConfig,
    pub config_sha256: String,
    pub inputs: Vec<InputFingerprint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputFingerprint {
    pub location: String,
    pub path: String,
    pub sha256: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn build(config: &CampaignConfig) -> Result<Manifest, CampaignError> {
        let config_json =
            serde_json::to_string(config).map_err(|e| CampaignError::Io(e.to_string()))?;
        let mut inputs = Vec::new();
        for loc in &config.locations {
            let bytes = std::fs::read(&loc.prices)
                .map_err(|e| CampaignError::Io(format!("{}: {e}", loc.prices)))?;
            inputs.push(InputFingerprint {
                location: loc.name.clone(),
                path: loc.prices.clone(),
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(Manifest {
            tool: "gridarb".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            config_sha256: sha256_hex(config_json.as_bytes()),
            inputs,
        })
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), CampaignError> {
        let json =
            serde_json::to_string_pretty(self).map_err(|e| CampaignError::Io(e.to_string()))?;
        std::fs::write(path.as_ref(), json).map_err(|e| CampaignError::Io(e.to_string()))
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Manifest, CampaignError> {
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| CampaignError::Io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| CampaignError::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{gen_synthetic, SyntheticConfig};

    fn synthetic_store(days: u32, location: &str, seed: u64) -> PriceStore {
        let cfg = SyntheticConfig {
            days,
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            dt_hours: 1.0,
            base_price: 40.0,
            daily_amplitude: 15.0,
            noise_sd: 3.0,
            reg_price_ratio: Some(0.4),
            suppression: None,
            location: location.into(),
        };
        let (series, _) = gen_synthetic(&cfg, seed).unwrap();
        let mut store = PriceStore::default();
        store.insert(series);
        store
    }

    fn base_config(days: u32) -> CampaignConfig {
        CampaignConfig {
            start: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            end: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap() + Duration::days(days as i64 - 1),
            devices: vec![DeviceConfig {
                preset: Some("li-ion".into()),
                spec: None,
                initial_soc_mwh: None,
            }],
            locations: vec![LocationConfig {
                name: "zone".into(),
                prices: "unused".into(),
                schema: None,
            }],
            modes: vec![Mode::Arbitrage],
            soc_policy: SocPolicy::CarryOver,
            horizon_hours: 24.0,
            dt_hours: 1.0,
            discount_rate: 0.0,
            terminal_policy: TerminalPolicy::Free,
            regulation: RegulationConfig::default(),
            workers: Some(1),
        }
    }

    #[test]
    fn carry_over_chains_terminal_soc() {
        let store = synthetic_store(2, "zone", 5);
        let config = base_config(2);
        let result = run(&config, &store).unwrap();
        assert_eq!(result.records.len(), 2);
        let day1 = &result.records[0];
        let day2 = &result.records[1];
        assert_eq!(day1.soc_end.to_bits(), day2.soc_start.to_bits());
    }

    #[test]
    fn independent_policy_resets_soc() {
        let store = synthetic_store(2, "zone", 5);
        let mut config = base_config(2);
        config.soc_policy = SocPolicy::Independent;
        let result = run(&config, &store).unwrap();
        assert_eq!(result.records[1].soc_start, 0.0);
    }

    #[test]
    fn identical_price_days_give_identical_independent_revenue() {
        // Zero noise makes every day the same; independent runs must match.
        let cfg = SyntheticConfig {
            days: 3,
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            dt_hours: 1.0,
            base_price: 40.0,
            daily_amplitude: 15.0,
            noise_sd: 0.0,
            reg_price_ratio: None,
            suppression: None,
            location: "zone".into(),
        };
        let (series, _) = gen_synthetic(&cfg, 0).unwrap();
        let mut store = PriceStore::default();
        store.insert(series);
        let mut config = base_config(3);
        config.soc_policy = SocPolicy::Independent;
        let result = run(&config, &store).unwrap();
        let revenues: Vec<f64> = result.records.iter().map(|r| r.total).collect();
        assert_eq!(revenues[0], revenues[1]);
        assert_eq!(revenues[1], revenues[2]);
    }

    #[test]
    fn record_cardinality_is_the_full_product() {
        let store = synthetic_store(3, "zone", 5);
        let mut config = base_config(3);
        config.devices.push(DeviceConfig {
            preset: Some("flywheel".into()),
            spec: None,
            initial_soc_mwh: None,
        });
        config.modes = vec![Mode::Arbitrage, Mode::Joint];
        let result = run(&config, &store).unwrap();
        assert_eq!(result.records.len(), 2 * 3 * 2);
        assert!(result.failures.is_empty(), "{:?}", result.failures);
    }

    #[test]
    fn coverage_gap_is_detected_before_solving() {
        let store = synthetic_store(2, "zone", 5);
        let config = base_config(4); // data only covers 2 days
        let err = run(&config, &store).unwrap_err();
        match err {
            CampaignError::Coverage(gaps) => {
                assert_eq!(gaps.len(), 2);
                assert!(gaps[0].contains("2019-01-03"));
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn aggregate_mean_of_three_days() {
        let mk = |day: u32, total: f64| RunRecord {
            date: NaiveDate::from_ymd_opt(2019, 1, day).unwrap(),
            device: "d".into(),
            location: "l".into(),
            mode: Mode::Arbitrage,
            status: RunStatus::Optimal,
            r_arb: total,
            r_reg: 0.0,
            total,
            soc_start: 0.0,
            soc_end: 0.0,
        };
        let result = CampaignResult {
            records: vec![mk(1, 1.0), mk(2, 2.0), mk(3, 3.0)],
            failures: vec![],
        };
        let rows = aggregate(&result, Grouping::Monthly, Statistic::Mean);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].period, "2019-01");
        assert_eq!(rows[0].days, 3);
        assert!((rows[0].total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monthly_sums_do_not_cross_contaminate() {
        let mk = |month: u32, day: u32, total: f64| RunRecord {
            date: NaiveDate::from_ymd_opt(2019, month, day).unwrap(),
            device: "d".into(),
            location: "l".into(),
            mode: Mode::Arbitrage,
            status: RunStatus::Optimal,
            r_arb: total,
            r_reg: 0.0,
            total,
            soc_start: 0.0,
            soc_end: 0.0,
        };
        let result = CampaignResult {
            records: vec![mk(1, 1, 1.0), mk(1, 2, 2.0), mk(2, 1, 10.0)],
            failures: vec![],
        };
        let rows = aggregate(&result, Grouping::Monthly, Statistic::Sum);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].period, "2019-01");
        assert!((rows[0].total - 3.0).abs() < 1e-12);
        assert_eq!(rows[1].period, "2019-02");
        assert!((rows[1].total - 10.0).abs() < 1e-12);
    }

    #[test]
    fn yoy_delta_arithmetic_and_undefined() {
        let mk = |year: i32, total: f64| RunRecord {
            date: NaiveDate::from_ymd_opt(year, 6, 1).unwrap(),
            device: "d".into(),
            location: "l".into(),
            mode: Mode::Arbitrage,
            status: RunStatus::Optimal,
            r_arb: total,
            r_reg: 0.0,
            total,
            soc_start: 0.0,
            soc_end: 0.0,
        };
        let result = CampaignResult {
            records: vec![mk(2019, 100.0), mk(2020, 63.0)],
            failures: vec![],
        };
        let rows = yoy_delta(&result, 2019, 2020).unwrap();
        assert_eq!(rows.len(), 1);
        match rows[0].delta {
            YoyValue::Pct(v) => assert!((v - -37.0).abs() < 1e-12),
            _ => panic!("expected a percentage"),
        }

        let flat = CampaignResult {
            records: vec![mk(2019, 50.0), mk(2020, 50.0)],
            failures: vec![],
        };
        match yoy_delta(&flat, 2019, 2020).unwrap()[0].delta {
            YoyValue::Pct(v) => assert_eq!(v, 0.0),
            _ => panic!("expected a percentage"),
        }

        let zero_base = CampaignResult {
            records: vec![mk(2019, 0.0), mk(2020, 5.0)],
            failures: vec![],
        };
        assert_eq!(
            yoy_delta(&zero_base, 2019, 2020).unwrap()[0].delta,
            YoyValue::Undefined
        );

        assert!(matches!(
            yoy_delta(&result, 2019, 2021),
            Err(CampaignError::MissingYear(2021))
        ));
    }

    #[test]
    fn records_csv_round_trip() {
        let store = synthetic_store(2, "zone", 9);
        let mut config = base_config(2);
        config.modes = vec![Mode::Arbitrage, Mode::Joint];
        let result = run(&config, &store).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        write_records_csv(f.path(), &result).unwrap();
        let loaded = load_records_csv(f.path()).unwrap();
        assert_eq!(loaded.records.len(), result.records.len());
        for (a, b) in loaded.records.iter().zip(&result.records) {
            assert_eq!(a.date, b.date);
            assert_eq!(a.total, b.total);
            assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn empty_device_list_is_a_config_error() {
        let store = synthetic_store(1, "zone", 1);
        let mut config = base_config(1);
        config.devices.clear();
        assert!(matches!(
            run(&config, &store),
            Err(CampaignError::Config(_))
        ));
    }

    #[test]
    fn shorter_horizon_solves_the_first_hours_of_each_day() {
        let store = synthetic_store(2, "zone", 5);
        let mut config = base_config(2);
        config.horizon_hours = 6.0;
        let result = run(&config, &store).unwrap();
        assert_eq!(result.records.len(), 2);
        assert!(result.records.iter().all(|r| r.status.is_optimal()));
        assert!(result.records.iter().all(|r| r.total.is_finite()));
    }

    #[test]
    fn regulation_overrides_apply_per_day() {
        // Zero noise makes both days identical, so any revenue difference
        // comes from the per-day override. A zero performance score turns
        // the capacity coefficient negative and kills the bid.
        let cfg = SyntheticConfig {
            days: 2,
            start_date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            dt_hours: 1.0,
            base_price: 40.0,
            daily_amplitude: 0.0,
            noise_sd: 0.0,
            reg_price_ratio: Some(0.5),
            suppression: None,
            location: "zone".into(),
        };
        let (series, _) = gen_synthetic(&cfg, 0).unwrap();
        let mut store = PriceStore::default();
        store.insert(series);

        let overrides = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(
            overrides.path(),
            "date,reg_up_fraction,reg_down_fraction,performance_score\n2019-01-02,0.1,0.1,0.0\n",
        )
        .unwrap();

        let mut config = base_config(2);
        config.modes = vec![Mode::Joint];
        config.soc_policy = SocPolicy::Independent;
        config.regulation.overrides = Some(overrides.path().display().to_string());
        let result = run(&config, &store).unwrap();
        assert!(result.records[0].r_reg > 0.0);
        assert_eq!(result.records[1].r_reg, 0.0);
    }

    #[test]
    fn missing_location_is_reported() {
        let store = synthetic_store(1, "otherzone", 1);
        let config = base_config(1);
        assert!(matches!(
            run(&config, &store),
            Err(CampaignError::MissingLocation(name)) if name == "zone"
        ));
    }
}
