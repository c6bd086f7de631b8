//! `gridarb` — storage revenue scheduling in energy and regulation markets.

mod campaign_cmd;
mod gen;
mod plot;
mod report;
mod solve;
mod util;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "gridarb",
    version,
    about = "Revenue-optimal scheduling of grid-scale energy storage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one horizon and write schedule.csv + revenue.json
    Solve(solve::SolveArgs),
    /// Generate a synthetic price CSV
    Gen(gen::GenArgs),
    /// Run a batch campaign from a config file
    Campaign(campaign_cmd::CampaignArgs),
    /// Re-aggregate existing campaign records without solving
    Report(report::ReportArgs),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve::run(args),
        Command::Gen(args) => gen::run(args),
        Command::Campaign(args) => campaign_cmd::run(args),
        Command::Report(args) => report::run(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}
