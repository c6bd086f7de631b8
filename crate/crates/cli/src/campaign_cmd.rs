use std::path::{Path, PathBuf};

use clap::Args;

use gridarb::campaign::{
    self, AggregateRow, CampaignConfig, CampaignError, CampaignResult, Grouping, Manifest,
    SocPolicy, Statistic, YoyRow,
};
use gridarb::ingest::{self, CsvSchema, PriceStore};

use crate::plot::{grouped_bar_svg, BarGroup};
use crate::util::{data, usage, CliError};

#[derive(Args)]
pub struct CampaignArgs {
    /// Campaign TOML config
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "campaign-out")]
    pub out_dir: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override the configured soc policy (carry-over, independent)
    #[arg(long)]
    pub soc_policy: Option<String>,
    /// Override the configured per-step discount rate
    #[arg(long)]
    pub discount: Option<f64>,
    /// Emit SVG charts next to the tables
    #[arg(long)]
    pub plot: bool,
}

fn map_err(e: CampaignError) -> CliError {
    match e {
        CampaignError::Config(_) | CampaignError::MissingLocation(_) => {
            usage(format!("campaign: {e}"))
        }
        other => data(format!("campaign: {other}")),
    }
}

pub fn load_config(path: &Path) -> Result<CampaignConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let config: CampaignConfig =
        toml::from_str(&text).map_err(|e| usage(format!("config: {e}")))?;
    // Referenced files must exist before any solving starts.
    for loc in &config.locations {
        if !Path::new(&loc.prices).exists() {
            return Err(usage(format!(
                "config: price file {} for {:?} does not exist",
                loc.prices, loc.name
            )));
        }
    }
    if let Some(overrides) = &config.regulation.overrides {
        if !Path::new(overrides).exists() {
            return Err(usage(format!(
                "config: regulation override file {overrides} does not exist"
            )));
        }
    }
    Ok(config)
}

pub fn load_store(config: &CampaignConfig) -> Result<PriceStore, CliError> {
    let mut store = PriceStore::default();
    for loc in &config.locations {
        let schema = loc.schema.clone().unwrap_or_else(CsvSchema::canonical);
        let file_store =
            ingest::load_prices(&loc.prices, &schema).map_err(|e| usage(format!("ingest: {e}")))?;
        match file_store.get(&loc.name) {
            Some(series) => store.insert(series.clone()),
            None => {
                return Err(usage(format!(
                    "ingest: {} has no location {:?}; found: {}",
                    loc.prices,
                    loc.name,
                    file_store.locations().join(", ")
                )))
            }
        }
    }
    Ok(store)
}

fn consecutive_year_pairs(result: &CampaignResult) -> Vec<(i32, i32)> {
    use chrono::Datelike;
    let mut years: Vec<i32> = result.records.iter().map(|r| r.date.year()).collect();
    years.sort_unstable();
    years.dedup();
    years.windows(2).map(|w| (w[0], w[1])).collect()
}

pub fn write_tables(
    out_dir: &Path,
    result: &CampaignResult,
) -> Result<(Vec<AggregateRow>, Vec<YoyRow>), CliError> {
    let annual_mean = campaign::aggregate(result, Grouping::Annual, Statistic::Mean);
    for (rows, name) in [
        (&annual_mean, "annual_mean.csv"),
        (&campaign::aggregate(result, Grouping::Annual, Statistic::Sum), "annual_sum.csv"),
        (&campaign::aggregate(result, Grouping::Monthly, Statistic::Mean), "monthly_mean.csv"),
        (&campaign::aggregate(result, Grouping::Monthly, Statistic::Sum), "monthly_sum.csv"),
    ] {
        campaign::write_aggregate_csv(out_dir.join(name), rows).map_err(map_err)?;
    }
    let mut yoy_rows = Vec::new();
    for (a, b) in consecutive_year_pairs(result) {
        yoy_rows.extend(campaign::yoy_delta(result, a, b).map_err(map_err)?);
    }
    campaign::write_yoy_csv(out_dir.join("yoy.csv"), &yoy_rows).map_err(map_err)?;
    Ok((annual_mean, yoy_rows))
}

pub fn write_plots(
    out_dir: &Path,
    annual_mean: &[AggregateRow],
    yoy_rows: &[YoyRow],
) -> Result<(), CliError> {
    let mut devices: Vec<&str> = annual_mean.iter().map(|r| r.device.as_str()).collect();
    devices.sort_unstable();
    devices.dedup();

    let revenue_groups: Vec<BarGroup> = devices
        .iter()
        .map(|device| BarGroup {
            label: device.to_string(),
            bars: annual_mean
                .iter()
                .filter(|r| r.device == *device)
                .map(|r| (format!("{} {}", r.period, r.mode), r.total))
                .collect(),
        })
        .collect();
    let svg = grouped_bar_svg(
        "Average daily revenue by year",
        "revenue [$/day]",
        &revenue_groups,
    );
    std::fs::write(out_dir.join("revenue_by_year.svg"), svg)
        .map_err(|e| data(format!("cannot write plot: {e}")))?;

    let yoy_groups: Vec<BarGroup> = devices
        .iter()
        .map(|device| BarGroup {
            label: device.to_string(),
            bars: yoy_rows
                .iter()
                .filter(|r| r.device == *device)
                .map(|r| {
                    let value = match r.delta {
                        campaign::YoyValue::Pct(v) => v,
                        campaign::YoyValue::Undefined => 0.0,
                    };
                    (format!("{}->{} {}", r.year_a, r.year_b, r.mode), value)
                })
                .collect(),
        })
        .collect();
    let svg = grouped_bar_svg(
        "Year-over-year revenue change",
        "change [%]",
        &yoy_groups,
    );
    std::fs::write(out_dir.join("yoy_change.svg"), svg)
        .map_err(|e| data(format!("cannot write plot: {e}")))?;
    Ok(())
}

pub fn run(args: CampaignArgs) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(workers) = args.workers {
        config.workers = Some(workers);
    }
    if let Some(policy) = &args.soc_policy {
        config.soc_policy = policy.parse::<SocPolicy>().map_err(map_err)?;
    }
    if let Some(rate) = args.discount {
        config.discount_rate = rate;
    }

    let store = load_store(&config)?;
    let result = campaign::run(&config, &store).map_err(map_err)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    campaign::write_records_csv(args.out_dir.join("records.csv"), &result).map_err(map_err)?;
    let (annual_mean, yoy_rows) = write_tables(&args.out_dir, &result)?;
    Manifest::build(&config)
        .map_err(map_err)?
        .write_json(args.out_dir.join("manifest.json"))
        .map_err(map_err)?;
    if args.plot {
        write_plots(&args.out_dir, &annual_mean, &yoy_rows)?;
    }

    if !result.failures.is_empty() {
        eprintln!("{} day(s) failed to solve:", result.failures.len());
        for failure in result.failures.iter().take(10) {
            eprintln!("  {failure}");
        }
    }
    println!(
        "{} records ({} failed) -> {}",
        result.records.len(),
        result.failures.len(),
        args.out_dir.display()
    );
    Ok(())
}
