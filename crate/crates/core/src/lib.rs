//! Revenue-optimal scheduling of grid-scale energy storage.
//!
//! The library solves daily charge/discharge/regulation schedules for a
//! storage device facing market prices, either trading energy alone
//! (arbitrage) or jointly bidding regulation capacity. Both models are
//! bounded-variable linear programs solved by the built-in revised simplex
//! with independent optimality certificates. On top of the single-horizon
//! core sit price-feed ingestion, reproducible synthetic scenarios and
//! multi-year batch campaigns with per-period aggregation.

pub mod campaign;
pub mod device;
pub mod ingest;
pub mod lp;
pub mod market;

pub use campaign::{CampaignConfig, CampaignResult};
pub use device::{preset, preset_by_name, DeviceSpec, Technology};
pub use ingest::{CsvSchema, PriceSeries, PriceStore, SyntheticConfig};
pub use lp::{solve, verify_certificate, LpProblem, LpSolution, LpStatus};
pub use market::{
    solve_horizon, HorizonProblem, Mode, RegulationParams, RevenueReport, Schedule,
    TerminalPolicy,
};
