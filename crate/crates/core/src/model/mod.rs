//! Domain types and the closed-form radio/coverage math.
//!
//! All quantities are SI linear internally (meters, seconds, watts, plain
//! power ratios). Decibel values only appear in [`file`] and in the
//! [`units`] helpers used at I/O boundaries.

mod file;
mod generate;
mod geometry;
pub mod units;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use file::{GbsRecord, RadioRecord, ScenarioFile, UavRecord};
pub use generate::{generate_scenario, Endpoints, GbsClass, GenSpec, Mix, RNG_STREAM};
pub use geometry::Point;

use crate::error::ModelError;

/// Radio constants shared by every station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Channel power gain at the 1 m reference distance (linear).
    pub beta0: f64,
    /// Receiver noise power in watts.
    pub noise_power: f64,
    /// Minimum receive SNR (linear).
    pub snr_threshold: f64,
}

impl RadioParams {
    pub fn new(beta0: f64, noise_power: f64, snr_threshold: f64) -> Result<Self, ModelError> {
        let params = RadioParams {
            beta0,
            noise_power,
            snr_threshold,
        };
        params.check()?;
        Ok(params)
    }

    /// Build from the usual dB-domain figures (`beta0` in dB, noise in dBm,
    /// threshold in dB).
    pub fn from_db(beta0_db: f64, noise_dbm: f64, snr_threshold_db: f64) -> Result<Self, ModelError> {
        Self::new(
            units::db_to_linear(beta0_db),
            units::dbm_to_watts(noise_dbm),
            units::db_to_linear(snr_threshold_db),
        )
    }

    pub fn check(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("beta0", self.beta0),
            ("noise_power", self.noise_power),
            ("snr_threshold", self.snr_threshold),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositive { name, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gbs {
    pub id: u32,
    pub position: Point,
    /// Antenna height in meters.
    pub antenna_height: f64,
    /// Transmit power in watts.
    pub tx_power: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub gbs_list: Vec<Gbs>,
    pub start: Point,
    pub finish: Point,
    /// UAV flight altitude in meters.
    pub uav_height: f64,
    /// Maximum UAV speed in m/s.
    pub v_max: f64,
    /// Mission completion time budget in seconds.
    pub t_max: f64,
    pub radio: RadioParams,
}

/// Horizontal disk in which a station meets the SNR threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageDisk {
    pub center: Point,
    pub radius: f64,
}

impl CoverageDisk {
    pub fn contains(&self, p: Point) -> bool {
        self.center.dist(p) <= self.radius
    }
}

impl Scenario {
    pub fn gbs(&self, id: u32) -> Option<&Gbs> {
        self.gbs_list.iter().find(|g| g.id == id)
    }

    /// Coverage disks keyed by station id, skipping stations that cannot
    /// serve the UAV at its altitude.
    pub fn coverage_disks(&self) -> BTreeMap<u32, CoverageDisk> {
        self.gbs_list
            .iter()
            .filter_map(|g| {
                coverage_radius(g, self).map(|radius| {
                    (
                        g.id,
                        CoverageDisk {
                            center: g.position,
                            radius,
                        },
                    )
                })
            })
            .collect()
    }

    /// Same scenario with a different SNR threshold (linear).
    pub fn with_snr_threshold(&self, snr_threshold: f64) -> Scenario {
        let mut s = self.clone();
        s.radio.snr_threshold = snr_threshold;
        s
    }

    pub fn with_t_max(&self, t_max: f64) -> Scenario {
        let mut s = self.clone();
        s.t_max = t_max;
        s
    }

    /// Error out on the problems that make planning meaningless. Coverage
    /// gaps and other soft issues are left to [`validate_scenario`].
    pub fn check(&self) -> Result<(), ModelError> {
        let hard: Vec<_> = validate_scenario(self)
            .into_iter()
            .filter(|d| d.is_fatal())
            .collect();
        match hard.into_iter().next() {
            Some(d) => Err(ModelError::Invalid(d.to_string())),
            None => Ok(()),
        }
    }
}

/// Receive SNR (linear) at horizontal position `uav_xy` when served by `gbs`.
///
/// The single singular point (UAV level with the antenna and directly above
/// it) maps to `+inf`.
pub fn snr(gbs: &Gbs, uav_xy: Point, scenario: &Scenario) -> f64 {
    let dh = scenario.uav_height - gbs.antenna_height;
    let d2 = dh * dh + gbs.position.dist_sq(uav_xy);
    let radio = &scenario.radio;
    if d2 == 0.0 {
        return f64::INFINITY;
    }
    gbs.tx_power * radio.beta0 / (radio.noise_power * d2)
}

/// Horizontal radius of the region where `snr >= threshold`, or `None` when
/// the station never reaches the threshold at the UAV altitude.
pub fn coverage_radius(gbs: &Gbs, scenario: &Scenario) -> Option<f64> {
    let radio = &scenario.radio;
    let dh = scenario.uav_height - gbs.antenna_height;
    let radicand = gbs.tx_power * radio.beta0 / (radio.noise_power * radio.snr_threshold) - dh * dh;
    (radicand > 0.0).then(|| radicand.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    DuplicateId(u32),
    NonPositive { field: String, value: f64 },
    NoCoverage { id: u32 },
    NoStations,
}

impl Diagnostic {
    /// Coverage gaps are informational; everything else blocks planning.
    pub fn is_fatal(&self) -> bool {
        !matches!(self, Diagnostic::NoCoverage { .. })
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DuplicateId(id) => write!(f, "duplicate GBS id {id}"),
            Diagnostic::NonPositive { field, value } => {
                write!(f, "{field} must be positive (got {value})")
            }
            Diagnostic::NoCoverage { id } => {
                write!(f, "GBS {id} never serves at altitude H (no coverage disk)")
            }
            Diagnostic::NoStations => write!(f, "scenario has no GBS"),
        }
    }
}

pub fn validate_scenario(scenario: &Scenario) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if scenario.gbs_list.is_empty() {
        out.push(Diagnostic::NoStations);
    }

    let mut positive = |field: String, value: f64| {
        if !(value.is_finite() && value > 0.0) {
            out.push(Diagnostic::NonPositive { field, value });
        }
    };
    positive("radio.beta0".into(), scenario.radio.beta0);
    positive("radio.noise_power".into(), scenario.radio.noise_power);
    positive("radio.snr_threshold".into(), scenario.radio.snr_threshold);
    positive("uav.v_max".into(), scenario.v_max);
    for g in &scenario.gbs_list {
        positive(format!("gbs[{}].tx_power", g.id), g.tx_power);
    }
    for g in &scenario.gbs_list {
        if !(g.antenna_height.is_finite() && g.antenna_height >= 0.0) {
            out.push(Diagnostic::NonPositive {
                field: format!("gbs[{}].antenna_height", g.id),
                value: g.antenna_height,
            });
        }
    }

    // A zero budget is a legal (infeasible unless start == finish) request.
    if !(scenario.t_max.is_finite() && scenario.t_max >= 0.0) {
        out.push(Diagnostic::NonPositive {
            field: "uav.t_max".into(),
            value: scenario.t_max,
        });
    }

    let mut seen = std::collections::BTreeSet::new();
    for g in &scenario.gbs_list {
        if !seen.insert(g.id) {
            out.push(Diagnostic::DuplicateId(g.id));
        }
    }

    if scenario.radio.check().is_ok() {
        for g in &scenario.gbs_list {
            if g.tx_power > 0.0 && coverage_radius(g, scenario).is_none() {
                out.push(Diagnostic::NoCoverage { id: g.id });
            }
        }
    }
    out
}
