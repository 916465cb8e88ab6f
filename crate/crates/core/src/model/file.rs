//! JSON scenario documents. Power-like quantities are stored in dB/dBm and
//! converted to linear on load.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::units::{db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm};
use super::{Gbs, Point, RadioParams, Scenario};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioRecord {
    pub beta0_db: f64,
    pub noise_dbm: f64,
    pub snr_threshold_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavRecord {
    pub height_m: f64,
    pub v_max_mps: f64,
    pub t_max_s: f64,
    pub start_xy_m: Point,
    pub finish_xy_m: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbsRecord {
    pub id: u32,
    pub xy_m: Point,
    pub antenna_height_m: f64,
    pub tx_power_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub radio: RadioRecord,
    pub uav: UavRecord,
    pub gbs: Vec<GbsRecord>,
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            radio: RadioRecord {
                beta0_db: linear_to_db(s.radio.beta0),
                noise_dbm: watts_to_dbm(s.radio.noise_power),
                snr_threshold_db: linear_to_db(s.radio.snr_threshold),
            },
            uav: UavRecord {
                height_m: s.uav_height,
                v_max_mps: s.v_max,
                t_max_s: s.t_max,
                start_xy_m: s.start,
                finish_xy_m: s.finish,
            },
            gbs: s
                .gbs_list
                .iter()
                .map(|g| GbsRecord {
                    id: g.id,
                    xy_m: g.position,
                    antenna_height_m: g.antenna_height,
                    tx_power_dbm: watts_to_dbm(g.tx_power),
                })
                .collect(),
        }
    }
}

impl From<&ScenarioFile> for Scenario {
    fn from(f: &ScenarioFile) -> Self {
        Scenario {
            gbs_list: f
                .gbs
                .iter()
                .map(|g| Gbs {
                    id: g.id,
                    position: g.xy_m,
                    antenna_height: g.antenna_height_m,
                    tx_power: dbm_to_watts(g.tx_power_dbm),
                })
                .collect(),
            start: f.uav.start_xy_m,
            finish: f.uav.finish_xy_m,
            uav_height: f.uav.height_m,
            v_max: f.uav.v_max_mps,
            t_max: f.uav.t_max_s,
            radio: RadioParams {
                beta0: db_to_linear(f.radio.beta0_db),
                noise_power: dbm_to_watts(f.radio.noise_dbm),
                snr_threshold: db_to_linear(f.radio.snr_threshold_db),
            },
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, ModelError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        Ok(Scenario::from(&file))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Scenario::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}
