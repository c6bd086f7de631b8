use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;

use gridarb::device::{self, DeviceSpec};
use gridarb::ingest::{self, CsvSchema};
use gridarb::lp::LpStatus;
use gridarb::market::{
    self, HorizonProblem, Mode, RegulationParams, RevenueSummary, TerminalPolicy,
};

use crate::util::{data, usage, CliError};

#[derive(Args)]
pub struct SolveArgs {
    /// Price CSV to solve against
    #[arg(long)]
    pub prices: PathBuf,
    /// Location label when the file carries several
    #[arg(long)]
    pub location: Option<String>,
    /// Device preset (li-ion, adv-lead-acid, vanadium-redox, lfp, flywheel)
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML config carrying a device spec, column schema or regulation
    /// settings; flags override config values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// arbitrage or joint
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub dt_hours: Option<f64>,
    /// Per-step discount rate
    #[arg(long)]
    pub discount: Option<f64>,
    /// free or return-to-start
    #[arg(long)]
    pub terminal: Option<String>,
    /// Starting state of charge in MWh
    #[arg(long)]
    pub initial_soc: Option<f64>,
    /// Solve only this day (YYYY-MM-DD) instead of the whole file
    #[arg(long)]
    pub date: Option<String>,
    #[arg(long)]
    pub reg_up: Option<f64>,
    #[arg(long)]
    pub reg_down: Option<f64>,
    #[arg(long)]
    pub performance_score: Option<f64>,
    #[arg(long)]
    pub penalty_factor: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Write the assembled program as a plain-text listing
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveFileConfig {
    pub preset: Option<String>,
    pub device: Option<DeviceSpec>,
    pub schema: Option<CsvSchema>,
    pub location: Option<String>,
    pub mode: Option<String>,
    pub dt_hours: Option<f64>,
    pub discount_rate: Option<f64>,
    pub terminal_policy: Option<String>,
    pub initial_soc_mwh: Option<f64>,
    pub regulation: Option<RegScalars>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegScalars {
    pub reg_up_fraction: f64,
    pub reg_down_fraction: f64,
    pub performance_score: f64,
    pub penalty_factor: f64,
}

impl Default for RegScalars {
    fn default() -> Self {
        RegScalars {
            reg_up_fraction: 0.1,
            reg_down_fraction: 0.1,
            performance_score: 0.95,
            penalty_factor: RegulationParams::DEFAULT_PENALTY_FACTOR,
        }
    }
}

pub fn run(args: SolveArgs) -> Result<(), CliError> {
    let config: SolveFileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("config: {e}")))?
        }
        None => SolveFileConfig::default(),
    };

    let schema = config.schema.clone().unwrap_or_default();
    let store = ingest::load_prices(&args.prices, &schema).map_err(|e| usage(format!("ingest: {e}")))?;
    let location = args.location.as_ref().or(config.location.as_ref());
    let series = match location {
        Some(name) => store.get(name).ok_or_else(|| {
            usage(format!(
                "ingest: no location {name:?} in {}; found: {}",
                args.prices.display(),
                store.locations().join(", ")
            ))
        })?,
        None => store.single().map_err(|e| usage(format!("ingest: {e}")))?,
    };

    let dt_hours = args.dt_hours.or(config.dt_hours).unwrap_or(1.0);
    let mut series = ingest::resample(series, dt_hours).map_err(|e| usage(format!("ingest: {e}")))?;
    if let Some(raw) = &args.date {
        let date: chrono::NaiveDate = raw
            .parse()
            .map_err(|e| usage(format!("bad --date {raw:?}: {e}")))?;
        let steps = ingest::steps_per_day(dt_hours).map_err(|e| usage(format!("ingest: {e}")))?;
        let start = series
            .index_of(date.and_hms_opt(0, 0, 0).unwrap())
            .filter(|&i| i + steps <= series.len())
            .ok_or_else(|| usage(format!("ingest: no full day of data for {date}")))?;
        series = series.window(start, steps);
    }

    let mut spec = match (&args.preset, &config.preset, &config.device) {
        (Some(name), _, _) => {
            device::preset_by_name(name).map_err(|e| usage(format!("device: {e}")))?
        }
        (None, Some(name), _) => {
            device::preset_by_name(name).map_err(|e| usage(format!("device: {e}")))?
        }
        (None, None, Some(spec)) => spec.clone(),
        (None, None, None) => {
            return Err(usage(
                "device required: pass --preset or provide [device] in --config",
            ))
        }
    };
    if let Some(soc) = args.initial_soc.or(config.initial_soc_mwh) {
        spec.initial_soc_mwh = soc;
    }
    let report = device::validate(&spec);
    if !report.is_valid() {
        return Err(usage(format!(
            "device: {}",
            report.violations.join("; ")
        )));
    }
    for warning in &report.warnings {
        eprintln!("warning: device: {warning}");
    }

    let mode: Mode = args
        .mode
        .as_deref()
        .or(config.mode.as_deref())
        .unwrap_or("arbitrage")
        .parse()
        .map_err(|e| usage(format!("market: {e}")))?;
    let horizon = series.len();
    let mut hp = HorizonProblem::new(spec, series, mode);
    hp.dt_hours = dt_hours;
    hp.discount_rate = args.discount.or(config.discount_rate).unwrap_or(0.0);
    hp.terminal_policy = match args.terminal.as_deref().or(config.terminal_policy.as_deref()) {
        Some(raw) => raw
            .parse::<TerminalPolicy>()
            .map_err(|e| usage(format!("market: {e}")))?,
        None => TerminalPolicy::Free,
    };
    if mode == Mode::Joint {
        let base = config.regulation.unwrap_or_default();
        let mut reg = RegulationParams::uniform(
            horizon,
            args.reg_up.unwrap_or(base.reg_up_fraction),
            args.reg_down.unwrap_or(base.reg_down_fraction),
            args.performance_score.unwrap_or(base.performance_score),
        );
        reg.penalty_factor = args.penalty_factor.unwrap_or(base.penalty_factor);
        hp.regulation = Some(reg);
    }
    hp.validate().map_err(|e| usage(format!("market: {e}")))?;

    if let Some(path) = &args.dump_lp {
        let program = market::build(&hp).map_err(|e| usage(format!("market: {e}")))?;
        std::fs::write(path, program.dump())
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }

    let outcome = market::solve_horizon(&hp).map_err(|e| data(format!("market: {e}")))?;
    match outcome.solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(data("market: model infeasible for this input")),
        LpStatus::Unbounded => return Err(data("lp: model unbounded; input is malformed")),
    }
    let schedule = outcome.schedule.expect("optimal");
    let revenue = outcome.report.expect("optimal");

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let schedule_path = args.out_dir.join("schedule.csv");
    market::write_schedule_csv(&schedule_path, &hp, &schedule, &revenue)
        .map_err(|e| data(format!("market: {e}")))?;
    let summary = RevenueSummary::new(&schedule, &revenue);
    let revenue_path = args.out_dir.join("revenue.json");
    let json = serde_json::to_string_pretty(&summary).expect("serializable");
    std::fs::write(&revenue_path, json)
        .map_err(|e| data(format!("cannot write {}: {e}", revenue_path.display())))?;

    println!(
        "r_arb={} r_reg={} total={}",
        revenue.r_arb, revenue.r_reg, revenue.total_discounted
    );
    Ok(())
}
