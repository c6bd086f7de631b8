//! Storage device parameters: bundled technology presets and validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("unknown technology {name:?}; valid names: {valid}")]
    UnknownTechnology { name: String, valid: String },
}

/// Physical parameters of one storage device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub name: String,
    /// Fraction of stored energy retained per step, in `[0, 1]`.
    #[serde(default = "one")]
    pub self_discharge_eff: f64,
    /// Fraction of charged energy actually stored, in `(0, 1]`.
    pub round_trip_eff: f64,
    pub capacity_mwh: f64,
    pub power_mw: f64,
    #[serde(default)]
    pub initial_soc_mwh: f64,
}

fn one() -> f64 {
    1.0
}

/// Hours a device needs to sustain rated power when discharging a full
/// store; several market rules key participation off this duration.
pub const ELIGIBILITY_DURATION_HOURS: f64 = 4.0;

/// The five bundled storage technologies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Technology {
    LiIon,
    AdvLeadAcid,
    VanadiumRedox,
    Lfp,
    Flywheel,
}

impl Technology {
    pub const ALL: [Technology; 5] = [
        Technology::LiIon,
        Technology::AdvLeadAcid,
        Technology::VanadiumRedox,
        Technology::Lfp,
        Technology::Flywheel,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Technology::LiIon => "li-ion",
            Technology::AdvLeadAcid => "adv-lead-acid",
            Technology::VanadiumRedox => "vanadium-redox",
            Technology::Lfp => "lfp",
            Technology::Flywheel => "flywheel",
        }
    }
}

impl std::str::FromStr for Technology {
    type Err = DeviceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lowered = s.trim().to_ascii_lowercase();
        for tech in Technology::ALL {
            if lowered == tech.label() {
                return Ok(tech);
            }
        }
        Err(DeviceError::UnknownTechnology {
            name: s.to_string(),
            valid: Technology::ALL
                .iter()
                .map(|t| t.label())
                .collect::<Vec<_>>()
                .join(", "),
        })
    }
}

impl std::fmt::Display for Technology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Preset parameters for a bundled technology. Initial state of charge
/// defaults to zero; override it per run when needed.
pub fn preset(tech: Technology) -> DeviceSpec {
    let (round_trip_eff, capacity_mwh, power_mw) = match tech {
        Technology::LiIon => (0.90, 24.0, 36.0),
        Technology::AdvLeadAcid => (0.95, 7.5, 10.0),
        Technology::VanadiumRedox => (0.85, 60.0, 15.0),
        Technology::Lfp => (0.93, 7.8, 19.8),
        Technology::Flywheel => (0.85, 5.0, 20.0),
    };
    DeviceSpec {
        name: tech.label().to_string(),
        self_discharge_eff: 1.0,
        round_trip_eff,
        capacity_mwh,
        power_mw,
        initial_soc_mwh: 0.0,
    }
}

/// Case-insensitive preset lookup by label.
pub fn preset_by_name(name: &str) -> Result<DeviceSpec, DeviceError> {
    name.parse::<Technology>().map(preset)
}

/// Result of validating a [`DeviceSpec`]: hard invariant violations plus
/// non-fatal market-eligibility warnings.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(spec: &DeviceSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut violation = |msg: String| report.violations.push(msg);

    if !(0.0..=1.0).contains(&spec.self_discharge_eff) || spec.self_discharge_eff.is_nan() {
        violation(format!(
            "self-discharge efficiency {} out of range [0, 1]",
            spec.self_discharge_eff
        ));
    }
    if !(spec.round_trip_eff > 0.0 && spec.round_trip_eff <= 1.0) {
        violation(format!(
            "round-trip efficiency {} out of range (0, 1]",
            spec.round_trip_eff
        ));
    }
    if !spec.capacity_mwh.is_finite() || spec.capacity_mwh < 0.0 {
        violation(format!(
            "energy capacity {} MWh must be finite and non-negative",
            spec.capacity_mwh
        ));
    }
    if !spec.power_mw.is_finite() || spec.power_mw < 0.0 {
        violation(format!(
            "power rating {} MW must be finite and non-negative",
            spec.power_mw
        ));
    }
    if spec.initial_soc_mwh.is_nan()
        || spec.initial_soc_mwh < 0.0
        || spec.initial_soc_mwh > spec.capacity_mwh
    {
        violation(format!(
            "initial state of charge {} MWh outside [0, {}]",
            spec.initial_soc_mwh, spec.capacity_mwh
        ));
    }

    if report.is_valid() && spec.power_mw > 0.0 {
        let duration = spec.capacity_mwh / spec.power_mw;
        if duration < ELIGIBILITY_DURATION_HOURS {
            report.warnings.push(format!(
                "discharge duration {duration:.2} h is below the {ELIGIBILITY_DURATION_HOURS} h \
                 market-eligibility threshold"
            ));
        }
    }
    report
}
