use std::path::PathBuf;

use clap::Args;

use gridarb::campaign::{self, Grouping, Statistic};

use crate::campaign_cmd;
use crate::util::{data, usage, CliError};

#[derive(Args)]
pub struct ReportArgs {
    /// records.csv from an earlier campaign run
    #[arg(long)]
    pub records: PathBuf,
    /// monthly or annual
    #[arg(long, default_value = "annual")]
    pub grouping: String,
    /// mean or sum
    #[arg(long, default_value = "mean")]
    pub statistic: String,
    /// Year pair for the delta table, e.g. 2019:2020 (default: all
    /// consecutive years found in the records)
    #[arg(long)]
    pub yoy: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub plot: bool,
}

pub fn run(args: ReportArgs) -> Result<(), CliError> {
    if !args.records.exists() {
        return Err(usage(format!(
            "records file {} does not exist",
            args.records.display()
        )));
    }
    let result = campaign::load_records_csv(&args.records)
        .map_err(|e| data(format!("campaign: {e}")))?;
    let grouping: Grouping = args
        .grouping
        .parse()
        .map_err(|e| usage(format!("campaign: {e}")))?;
    let statistic: Statistic = args
        .statistic
        .parse()
        .map_err(|e| usage(format!("campaign: {e}")))?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| usage(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let rows = campaign::aggregate(&result, grouping, statistic);
    let table_name = format!("aggregate_{}_{}.csv", args.grouping, args.statistic);
    campaign::write_aggregate_csv(args.out_dir.join(&table_name), &rows)
        .map_err(|e| data(format!("campaign: {e}")))?;

    let yoy_rows = match &args.yoy {
        Some(raw) => {
            let (a, b) = raw
                .split_once(':')
                .ok_or_else(|| usage(format!("--yoy {raw:?}: expected YEAR_A:YEAR_B")))?;
            let a: i32 = a.parse().map_err(|_| usage(format!("bad year {a:?}")))?;
            let b: i32 = b.parse().map_err(|_| usage(format!("bad year {b:?}")))?;
            campaign::yoy_delta(&result, a, b).map_err(|e| data(format!("campaign: {e}")))?
        }
        None => {
            use chrono::Datelike;
            let mut years: Vec<i32> = result.records.iter().map(|r| r.date.year()).collect();
            years.sort_unstable();
            years.dedup();
            let mut rows = Vec::new();
            for pair in years.windows(2) {
                rows.extend(
                    campaign::yoy_delta(&result, pair[0], pair[1])
                        .map_err(|e| data(format!("campaign: {e}")))?,
                );
            }
            rows
        }
    };
    campaign::write_yoy_csv(args.out_dir.join("yoy.csv"), &yoy_rows)
        .map_err(|e| data(format!("campaign: {e}")))?;

    if args.plot {
        let annual_mean = campaign::aggregate(&result, Grouping::Annual, Statistic::Mean);
        campaign_cmd::write_plots(&args.out_dir, &annual_mean, &yoy_rows)?;
    }
    println!(
        "{} aggregate rows, {} delta rows -> {}",
        rows.len(),
        yoy_rows.len(),
        args.out_dir.display()
    );
    Ok(())
}
