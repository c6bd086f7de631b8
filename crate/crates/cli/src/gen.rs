use std::path::PathBuf;

use clap::Args;

use gridarb::ingest::{self, Suppression, SyntheticConfig};

use crate::util::{parse_date_or_month, usage, CliError};

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub days: u32,
    #[arg(long, default_value = "2019-01-01")]
    pub start_date: String,
    #[arg(long, default_value_t = 1.0)]
    pub dt_hours: f64,
    /// Mean price level [$/MWh]
    #[arg(long, default_value_t = 40.0)]
    pub base: f64,
    /// Diurnal swing around the base [$/MWh]
    #[arg(long, default_value_t = 15.0)]
    pub amplitude: f64,
    /// Noise standard deviation [$/MWh]
    #[arg(long, default_value_t = 3.0)]
    pub noise: f64,
    /// Regulation capacity price as a ratio of |lmp|; omit to skip the channel
    #[arg(long)]
    pub reg_ratio: Option<f64>,
    /// Price-suppression window, e.g. 2020-03:2020-12=0.6 (months or dates)
    #[arg(long)]
    pub suppress: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "synthetic")]
    pub location: String,
    #[arg(long, default_value = "prices.csv")]
    pub out: PathBuf,
}

fn parse_suppression(raw: &str) -> Result<Suppression, CliError> {
    let (range, factor) = raw
        .rsplit_once('=')
        .ok_or_else(|| usage(format!("--suppress {raw:?}: expected RANGE=FACTOR")))?;
    let (from, to) = range
        .split_once(':')
        .ok_or_else(|| usage(format!("--suppress {raw:?}: expected FROM:TO=FACTOR")))?;
    Ok(Suppression {
        from: parse_date_or_month(from, false)?,
        to: parse_date_or_month(to, true)?,
        factor: factor
            .parse()
            .map_err(|_| usage(format!("--suppress factor {factor:?} is not a number")))?,
    })
}

pub fn run(args: GenArgs) -> Result<(), CliError> {
    let config = SyntheticConfig {
        days: args.days,
        start_date: args
            .start_date
            .parse()
            .map_err(|e| usage(format!("bad --start-date: {e}")))?,
        dt_hours: args.dt_hours,
        base_price: args.base,
        daily_amplitude: args.amplitude,
        noise_sd: args.noise,
        reg_price_ratio: args.reg_ratio,
        suppression: args.suppress.as_deref().map(parse_suppression).transpose()?,
        location: args.location.clone(),
    };
    let (series, warnings) =
        ingest::gen_synthetic(&config, args.seed).map_err(|e| usage(format!("ingest: {e}")))?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    ingest::write_prices_csv(&args.out, [&series]).map_err(|e| usage(format!("ingest: {e}")))?;
    println!(
        "wrote {} steps for {} to {}",
        series.len(),
        series.location,
        args.out.display()
    );
    Ok(())
}
