//! Daily-horizon market models: the arbitrage program, the joint
//! arbitrage-plus-regulation program, schedule extraction and settlement.
//!
//! Decision variables per step are the energy charged, the energy
//! discharged, the regulation capacity bid (joint mode) and the resulting
//! state of charge. Deployed regulation energy settles at the energy price
//! through the up/down deployment fractions, and the capacity payment is
//! scaled by `1 - penalty_factor * (1 - performance_score)`.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

use crate::device::{self, DeviceSpec};
use crate::ingest::PriceSeries;
use crate::lp::{self, LpError, LpProblem, LpSolution, LpStatus};

/// Feasibility tolerance applied to emitted schedules.
pub const SCHEDULE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("construction error: {0}")]
    Construction(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("schedule violates model invariants: {0}")]
    Inconsistent(String),
    #[error("settlement refused, schedule infeasible: {0}")]
    InfeasibleSchedule(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Market participation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Arbitrage,
    Joint,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Arbitrage => f.write_str("arbitrage"),
            Mode::Joint => f.write_str("joint"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "arbitrage" => Ok(Mode::Arbitrage),
            "joint" => Ok(Mode::Joint),
            other => Err(ModelError::Construction(format!(
                "unknown mode {other:?}; expected arbitrage or joint"
            ))),
        }
    }
}

/// End-of-horizon state-of-charge handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalPolicy {
    /// No terminal constraint.
    #[default]
    Free,
    /// The final state of charge may not fall below the initial one.
    ReturnToStart,
}

impl std::str::FromStr for TerminalPolicy {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "free" => Ok(TerminalPolicy::Free),
            "return-to-start" => Ok(TerminalPolicy::ReturnToStart),
            other => Err(ModelError::Construction(format!(
                "unknown terminal policy {other:?}; expected free or return-to-start"
            ))),
        }
    }
}

/// Regulation market parameters, one entry per step of the horizon.
///
/// `mileage_ratio` is carried for data completeness but enters no model
/// term; movement-based payments are out of scope.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulationParams {
    /// Fraction of the bid deployed as regulation up (extra discharge).
    pub reg_up_fraction: Vec<f64>,
    /// Fraction of the bid deployed as regulation down (extra charge).
    pub reg_down_fraction: Vec<f64>,
    /// Operator-tracked performance score in `[0, 1]`.
    pub performance_score: Vec<f64>,
    pub penalty_factor: f64,
    pub mileage_ratio: Option<Vec<f64>>,
}

impl RegulationParams {
    pub const DEFAULT_PENALTY_FACTOR: f64 = 1.1;

    pub fn uniform(len: usize, up: f64, down: f64, score: f64) -> Self {
        RegulationParams {
            reg_up_fraction: vec![up; len],
            reg_down_fraction: vec![down; len],
            performance_score: vec![score; len],
            penalty_factor: Self::DEFAULT_PENALTY_FACTOR,
            mileage_ratio: None,
        }
    }

    /// Fallback series for runs that do not supply deployment data. These
    /// are tool defaults picked for plausibility, not published market
    /// statistics; override them whenever real series are available.
    pub fn defaults(len: usize) -> Self {
        Self::uniform(len, 0.1, 0.1, 0.95)
    }

    pub fn validate(&self, horizon: usize) -> Result<(), ModelError> {
        let check_len = |name: &str, len: usize| {
            if len != horizon {
                Err(ModelError::Construction(format!(
                    "regulation series {name} has {len} steps, horizon needs {horizon}"
                )))
            } else {
                Ok(())
            }
        };
        check_len("reg_up_fraction", self.reg_up_fraction.len())?;
        check_len("reg_down_fraction", self.reg_down_fraction.len())?;
        check_len("performance_score", self.performance_score.len())?;
        if let Some(m) = &self.mileage_ratio {
            check_len("mileage_ratio", m.len())?;
        }
        let in_unit = |name: &str, v: &[f64]| {
            if let Some(bad) = v.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                Err(ModelError::Construction(format!(
                    "{name} value {bad} outside [0, 1]"
                )))
            } else {
                Ok(())
            }
        };
        in_unit("reg_up_fraction", &self.reg_up_fraction)?;
        in_unit("reg_down_fraction", &self.reg_down_fraction)?;
        in_unit("performance_score", &self.performance_score)?;
        if !(self.penalty_factor >= 0.0) {
            return Err(ModelError::Construction(format!(
                "penalty factor {} must be >= 0",
                self.penalty_factor
            )));
        }
        Ok(())
    }
}

/// One optimization instance: a device, a price window and the market
/// settings for a single horizon.
#[derive(Debug, Clone)]
pub struct HorizonProblem {
    pub device: DeviceSpec,
    pub prices: PriceSeries,
    /// Required in joint mode; ignored otherwise.
    pub regulation: Option<RegulationParams>,
    pub dt_hours: f64,
    /// Per-step discount rate; the step at index `t` is weighted by
    /// `exp(-rate * t)`. Zero by default so daily revenue splits add up
    /// exactly.
    pub discount_rate: f64,
    pub mode: Mode,
    pub terminal_policy: TerminalPolicy,
}

impl HorizonProblem {
    pub fn new(device: DeviceSpec, prices: PriceSeries, mode: Mode) -> Self {
        HorizonProblem {
            device,
            prices,
            regulation: None,
            dt_hours: 1.0,
            discount_rate: 0.0,
            mode,
            terminal_policy: TerminalPolicy::Free,
        }
    }

    pub fn horizon(&self) -> usize {
        self.prices.len()
    }

    /// Per-step energy throughput cap in MWh.
    pub fn step_energy_cap(&self) -> f64 {
        self.device.power_mw * self.dt_hours
    }

    fn discount(&self, t: usize) -> f64 {
        (-self.discount_rate * t as f64).exp()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let report = device::validate(&self.device);
        if !report.is_valid() {
            return Err(ModelError::Construction(format!(
                "invalid device: {}",
                report.violations.join("; ")
            )));
        }
        self.prices
            .validate()
            .map_err(|e| ModelError::Construction(e.to_string()))?;
        if self.horizon() < 1 {
            return Err(ModelError::Construction("horizon must be >= 1".into()));
        }
        if !(self.dt_hours > 0.0 && self.dt_hours.is_finite()) {
            return Err(ModelError::Construction(format!(
                "step length {} h must be positive",
                self.dt_hours
            )));
        }
        if !(self.discount_rate >= 0.0 && self.discount_rate.is_finite()) {
            return Err(ModelError::Construction(format!(
                "discount rate {} must be >= 0",
                self.discount_rate
            )));
        }
        if self.mode == Mode::Joint {
            match &self.prices.rcp {
                Some(rcp) if rcp.len() == self.horizon() => {}
                _ => {
                    return Err(ModelError::Construction(
                        "regulation capacity price required for every step in joint mode".into(),
                    ))
                }
            }
            match &self.regulation {
                Some(reg) => reg.validate(self.horizon())?,
                None => {
                    return Err(ModelError::Construction(
                        "regulation parameters required in joint mode".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

// Column layout shared by the builders and the extractor: charge block,
// discharge block, regulation block (joint only), then state of charge.
fn col_charge(t: usize) -> usize {
    t
}
fn col_discharge(horizon: usize, t: usize) -> usize {
    horizon + t
}
fn col_regulation(horizon: usize, t: usize) -> usize {
    2 * horizon + t
}
fn col_soc(mode: Mode, horizon: usize, t: usize) -> usize {
    match mode {
        Mode::Arbitrage => 2 * horizon + t,
        Mode::Joint => 3 * horizon + t,
    }
}

/// Builds the energy-market arbitrage program: maximize the price-weighted
/// net discharge subject to the state-of-charge recursion, capacity bounds
/// and the per-step power cap.
pub fn build_arbitrage(hp: &HorizonProblem) -> Result<LpProblem, ModelError> {
    if hp.mode != Mode::Arbitrage {
        return Err(ModelError::Construction(
            "build_arbitrage called on a joint-mode problem".into(),
        ));
    }
    hp.validate()?;
    let t_max = hp.horizon();
    let d = &hp.device;
    let cap = hp.step_energy_cap();
    let mut p = LpProblem::new(3 * t_max);

    for t in 0..t_max {
        let disc = hp.discount(t);
        let (qr, qd, s) = (
            col_charge(t),
            col_discharge(t_max, t),
            col_soc(Mode::Arbitrage, t_max, t),
        );
        p.objective[qd] = hp.prices.lmp[t] * disc;
        p.objective[qr] = -hp.prices.lmp[t] * disc;
        p.set_var_bounds(qr, 0.0, cap);
        p.set_var_bounds(qd, 0.0, cap);
        p.set_var_bounds(s, 0.0, d.capacity_mwh);
        p.set_col_name(qr, format!("charge[{t}]"));
        p.set_col_name(qd, format!("discharge[{t}]"));
        p.set_col_name(s, format!("soc[{}]", t + 1));

        // s_{t+1} = eta_s * s_t + eta_c * charge - discharge
        let mut entries = vec![(s, 1.0), (qr, -d.round_trip_eff), (qd, 1.0)];
        let rhs = if t == 0 {
            d.self_discharge_eff * d.initial_soc_mwh
        } else {
            entries.push((col_soc(Mode::Arbitrage, t_max, t - 1), -d.self_discharge_eff));
            0.0
        };
        p.add_row(rhs, rhs, &entries);
        p.push_row_name(format!("soc[{t}]"));
    }
    for t in 0..t_max {
        p.add_row(
            f64::NEG_INFINITY,
            cap,
            &[(col_charge(t), 1.0), (col_discharge(t_max, t), 1.0)],
        );
        p.push_row_name(format!("power[{t}]"));
    }
    if hp.terminal_policy == TerminalPolicy::ReturnToStart {
        p.add_row(
            d.initial_soc_mwh,
            f64::INFINITY,
            &[(col_soc(Mode::Arbitrage, t_max, t_max - 1), 1.0)],
        );
        p.push_row_name("terminal".to_string());
    }
    Ok(p)
}

/// Builds the joint arbitrage-plus-regulation program. Deployed regulation
/// energy settles at the energy price; the capacity payment is scaled by
/// the performance penalty term.
pub fn build_joint(hp: &HorizonProblem) -> Result<LpProblem, ModelError> {
    if hp.mode != Mode::Joint {
        return Err(ModelError::Construction(
            "build_joint called on an arbitrage-mode problem".into(),
        ));
    }
    hp.validate()?;
    let t_max = hp.horizon();
    let d = &hp.device;
    let cap = hp.step_energy_cap();
    let reg = hp.regulation.as_ref().expect("validated");
    let rcp = hp.prices.rcp.as_ref().expect("validated");
    let mut p = LpProblem::new(4 * t_max);

    for t in 0..t_max {
        let disc = hp.discount(t);
        let lmp = hp.prices.lmp[t];
        let (up, down, score) = (
            reg.reg_up_fraction[t],
            reg.reg_down_fraction[t],
            reg.performance_score[t],
        );
        let (qr, qd, qg, s) = (
            col_charge(t),
            col_discharge(t_max, t),
            col_regulation(t_max, t),
            col_soc(Mode::Joint, t_max, t),
        );
        p.objective[qd] = lmp * disc;
        p.objective[qr] = -lmp * disc;
        p.objective[qg] =
            (lmp * (up - down) + rcp[t] * (1.0 - reg.penalty_factor * (1.0 - score))) * disc;
        p.set_var_bounds(qr, 0.0, cap);
        p.set_var_bounds(qd, 0.0, cap);
        p.set_var_bounds(qg, 0.0, cap);
        p.set_var_bounds(s, 0.0, d.capacity_mwh);
        p.set_col_name(qr, format!("charge[{t}]"));
        p.set_col_name(qd, format!("discharge[{t}]"));
        p.set_col_name(qg, format!("regulation[{t}]"));
        p.set_col_name(s, format!("soc[{}]", t + 1));

        // s_{t+1} = eta_s s_t + eta_c charge - discharge
        //           + eta_c down_frac bid - up_frac bid
        let mut entries = vec![
            (s, 1.0),
            (qr, -d.round_trip_eff),
            (qd, 1.0),
            (qg, up - d.round_trip_eff * down),
        ];
        let rhs = if t == 0 {
            d.self_discharge_eff * d.initial_soc_mwh
        } else {
            entries.push((col_soc(Mode::Joint, t_max, t - 1), -d.self_discharge_eff));
            0.0
        };
        p.add_row(rhs, rhs, &entries);
        p.push_row_name(format!("soc[{t}]"));
    }
    for t in 0..t_max {
        p.add_row(
            f64::NEG_INFINITY,
            cap,
            &[
                (col_charge(t), 1.0),
                (col_discharge(t_max, t), 1.0),
                (col_regulation(t_max, t), 1.0),
            ],
        );
        p.push_row_name(format!("power[{t}]"));
    }
    if hp.terminal_policy == TerminalPolicy::ReturnToStart {
        p.add_row(
            d.initial_soc_mwh,
            f64::INFINITY,
            &[(col_soc(Mode::Joint, t_max, t_max - 1), 1.0)],
        );
        p.push_row_name("terminal".to_string());
    }
    Ok(p)
}

/// Builds the program matching `hp.mode`.
pub fn build(hp: &HorizonProblem) -> Result<LpProblem, ModelError> {
    match hp.mode {
        Mode::Arbitrage => build_arbitrage(hp),
        Mode::Joint => build_joint(hp),
    }
}

/// Per-step decisions of one horizon. `soc_mwh` has one more entry than the
/// horizon: `soc_mwh[0]` is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub charge_mwh: Vec<f64>,
    pub discharge_mwh: Vec<f64>,
    /// Zero in arbitrage mode.
    pub regulation_mwh: Vec<f64>,
    pub soc_mwh: Vec<f64>,
}

impl Schedule {
    pub fn horizon(&self) -> usize {
        self.charge_mwh.len()
    }

    /// Steps where the optimizer charges and discharges simultaneously.
    /// The models do not forbid it (that would need integer variables) and
    /// negative prices can make it profitable; flag it for interpretation.
    pub fn simultaneous_steps(&self) -> Vec<usize> {
        (0..self.horizon())
            .filter(|&t| self.charge_mwh[t] > SCHEDULE_TOL && self.discharge_mwh[t] > SCHEDULE_TOL)
            .collect()
    }

    /// All invariant violations beyond `tol`: non-negativity, capacity and
    /// power caps, and the state-of-charge recursion.
    pub fn check(&self, hp: &HorizonProblem, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        let t_max = self.horizon();
        if self.discharge_mwh.len() != t_max
            || self.regulation_mwh.len() != t_max
            || self.soc_mwh.len() != t_max + 1
            || t_max != hp.horizon()
        {
            out.push("schedule series lengths are inconsistent".into());
            return out;
        }
        let d = &hp.device;
        let cap = hp.step_energy_cap();
        let zero_reg = vec![0.0; t_max];
        let (up, down): (&[f64], &[f64]) = match (hp.mode, &hp.regulation) {
            (Mode::Joint, Some(reg)) => (&reg.reg_up_fraction, &reg.reg_down_fraction),
            _ => (&zero_reg, &zero_reg),
        };
        for t in 0..t_max {
            for (name, v) in [
                ("charge", self.charge_mwh[t]),
                ("discharge", self.discharge_mwh[t]),
                ("regulation", self.regulation_mwh[t]),
            ] {
                if v < -tol {
                    out.push(format!("step {t}: {name} {v} is negative"));
                }
            }
            let throughput = self.charge_mwh[t] + self.discharge_mwh[t] + self.regulation_mwh[t];
            if throughput > cap + tol {
                out.push(format!(
                    "step {t}: throughput {throughput} exceeds power cap {cap}"
                ));
            }
            let expected = d.self_discharge_eff * self.soc_mwh[t]
                + d.round_trip_eff * self.charge_mwh[t]
                - self.discharge_mwh[t]
                + (d.round_trip_eff * down[t] - up[t]) * self.regulation_mwh[t];
            if (self.soc_mwh[t + 1] - expected).abs() > tol {
                out.push(format!(
                    "step {t}: state of charge {} does not follow the recursion ({expected})",
                    self.soc_mwh[t + 1]
                ));
            }
        }
        for (t, &s) in self.soc_mwh.iter().enumerate() {
            if s < -tol || s > d.capacity_mwh + tol {
                out.push(format!(
                    "state of charge {s} at boundary {t} outside [0, {}]",
                    d.capacity_mwh
                ));
            }
        }
        out
    }
}

/// Maps an optimal solution back onto named per-step series and re-checks
/// every schedule invariant.
pub fn extract_schedule(hp: &HorizonProblem, sol: &LpSolution) -> Result<Schedule, ModelError> {
    if sol.status != LpStatus::Optimal {
        return Err(ModelError::Contract(format!(
            "cannot extract a schedule from a {:?} solution",
            sol.status
        )));
    }
    let t_max = hp.horizon();
    let expected_vars = match hp.mode {
        Mode::Arbitrage => 3 * t_max,
        Mode::Joint => 4 * t_max,
    };
    if sol.primal_values.len() != expected_vars {
        return Err(ModelError::Contract(format!(
            "solution has {} variables, expected {expected_vars}",
            sol.primal_values.len()
        )));
    }
    let x = &sol.primal_values;
    let mut soc = Vec::with_capacity(t_max + 1);
    soc.push(hp.device.initial_soc_mwh);
    soc.extend((0..t_max).map(|t| x[col_soc(hp.mode, t_max, t)]));
    let schedule = Schedule {
        charge_mwh: (0..t_max).map(|t| x[col_charge(t)]).collect(),
        discharge_mwh: (0..t_max).map(|t| x[col_discharge(t_max, t)]).collect(),
        regulation_mwh: match hp.mode {
            Mode::Arbitrage => vec![0.0; t_max],
            Mode::Joint => (0..t_max).map(|t| x[col_regulation(t_max, t)]).collect(),
        },
        soc_mwh: soc,
    };
    let violations = schedule.check(hp, SCHEDULE_TOL);
    if !violations.is_empty() {
        return Err(ModelError::Inconsistent(violations.join("; ")));
    }
    Ok(schedule)
}

/// Settled cashflows of one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct RevenueReport {
    /// Energy-market component (undiscounted).
    pub r_arb: f64,
    /// Regulation-capacity component (undiscounted).
    pub r_reg: f64,
    /// Discounted objective-equivalent total.
    pub total_discounted: f64,
    /// Undiscounted cashflow per step.
    pub per_step_cashflow: Vec<f64>,
}

/// Settles a feasible schedule against the market prices. This recomputes
/// revenue from the schedule itself, independently of the solver objective.
pub fn settle(hp: &HorizonProblem, schedule: &Schedule) -> Result<RevenueReport, ModelError> {
    hp.validate()?;
    let violations = schedule.check(hp, SCHEDULE_TOL);
    if !violations.is_empty() {
        return Err(ModelError::InfeasibleSchedule(violations.join("; ")));
    }
    let t_max = hp.horizon();
    let mut r_arb = 0.0;
    let mut r_reg = 0.0;
    let mut total = 0.0;
    let mut cashflows = Vec::with_capacity(t_max);
    for t in 0..t_max {
        let lmp = hp.prices.lmp[t];
        let net_energy = match (hp.mode, &hp.regulation) {
            (Mode::Joint, Some(reg)) => {
                self_net(schedule, t)
                    + (reg.reg_up_fraction[t] - reg.reg_down_fraction[t]) * schedule.regulation_mwh[t]
            }
            _ => self_net(schedule, t),
        };
        let arb = lmp * net_energy;
        let reg_pay = match (hp.mode, &hp.regulation, &hp.prices.rcp) {
            (Mode::Joint, Some(reg), Some(rcp)) => {
                rcp[t]
                    * schedule.regulation_mwh[t]
                    * (1.0 - reg.penalty_factor * (1.0 - reg.performance_score[t]))
            }
            _ => 0.0,
        };
        r_arb += arb;
        r_reg += reg_pay;
        let cashflow = arb + reg_pay;
        cashflows.push(cashflow);
        total += cashflow * hp.discount(t);
    }
    Ok(RevenueReport {
        r_arb,
        r_reg,
        total_discounted: total,
        per_step_cashflow: cashflows,
    })
}

fn self_net(schedule: &Schedule, t: usize) -> f64 {
    schedule.discharge_mwh[t] - schedule.charge_mwh[t]
}

/// Result of one horizon solve.
#[derive(Debug, Clone)]
pub struct HorizonOutcome {
    pub solution: LpSolution,
    /// Present when the solve was optimal.
    pub schedule: Option<Schedule>,
    pub report: Option<RevenueReport>,
}

/// Builds, solves, extracts and settles one horizon.
pub fn solve_horizon(hp: &HorizonProblem) -> Result<HorizonOutcome, ModelError> {
    let problem = build(hp)?;
    let solution = lp::solve(&problem)?;
    if solution.status != LpStatus::Optimal {
        return Ok(HorizonOutcome {
            solution,
            schedule: None,
            report: None,
        });
    }
    let schedule = extract_schedule(hp, &solution)?;
    let report = settle(hp, &schedule)?;
    Ok(HorizonOutcome {
        solution,
        schedule: Some(schedule),
        report: Some(report),
    })
}

/// JSON revenue summary written next to a schedule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RevenueSummary {
    pub status: String,
    pub r_arb: f64,
    pub r_reg: f64,
    pub total_discounted: f64,
    /// Steps flagged for simultaneous charge and discharge.
    pub simultaneous_steps: Vec<usize>,
}

impl RevenueSummary {
    pub fn new(schedule: &Schedule, report: &RevenueReport) -> Self {
        RevenueSummary {
            status: "optimal".into(),
            r_arb: report.r_arb,
            r_reg: report.r_reg,
            total_discounted: report.total_discounted,
            simultaneous_steps: schedule.simultaneous_steps(),
        }
    }
}

/// One parsed row of a schedule CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRow {
    pub time: chrono::NaiveDateTime,
    pub charge_mwh: f64,
    pub discharge_mwh: f64,
    pub regulation_mwh: f64,
    pub soc_mwh: f64,
    pub cashflow: f64,
}

/// Writes a schedule as CSV, one row per step; the state-of-charge column
/// holds the end-of-step value.
pub fn write_schedule_csv(
    path: impl AsRef<Path>,
    hp: &HorizonProblem,
    schedule: &Schedule,
    report: &RevenueReport,
) -> Result<(), ModelError> {
    let mut w = csv::Writer::from_path(path.as_ref())
        .map_err(|e| ModelError::Contract(format!("cannot write schedule: {e}")))?;
    w.write_record(["time", "charge_mwh", "discharge_mwh", "regulation_mwh", "soc_mwh", "cashflow"])
        .map_err(|e| ModelError::Contract(e.to_string()))?;
    for t in 0..schedule.horizon() {
        w.write_record([
            hp.prices.timestamps[t].format("%Y-%m-%dT%H:%M:%S").to_string(),
            schedule.charge_mwh[t].to_string(),
            schedule.discharge_mwh[t].to_string(),
            schedule.regulation_mwh[t].to_string(),
            schedule.soc_mwh[t + 1].to_string(),
            report.per_step_cashflow[t].to_string(),
        ])
        .map_err(|e| ModelError::Contract(e.to_string()))?;
    }
    w.flush().map_err(|e| ModelError::Contract(e.to_string()))?;
    Ok(())
}

/// Reads back a schedule CSV written by [`write_schedule_csv`].
pub fn read_schedule_csv(path: impl AsRef<Path>) -> Result<Vec<ScheduleRow>, ModelError> {
    let mut reader = csv::Reader::from_path(path.as_ref())
        .map_err(|e| ModelError::Contract(format!("cannot read schedule: {e}")))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| ModelError::Contract(e.to_string()))?;
        let field = |i: usize| -> Result<f64, ModelError> {
            record[i]
                .parse()
                .map_err(|_| ModelError::Contract(format!("bad number {:?}", &record[i])))
        };
        rows.push(ScheduleRow {
            time: chrono::NaiveDateTime::parse_from_str(&record[0], "%Y-%m-%dT%H:%M:%S")
                .map_err(|e| ModelError::Contract(e.to_string()))?,
            charge_mwh: field(1)?,
            discharge_mwh: field(2)?,
            regulation_mwh: field(3)?,
            soc_mwh: field(4)?,
            cashflow: field(5)?,
        });
    }
    Ok(rows)
}
