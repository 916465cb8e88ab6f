//! Seeded random scenario generation.
//!
//! Stream layout (versioned as `chacha8-v1`): a `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)`; for each station in ascending id order draw
//! `x = side * U` then `y = side * U`, where `U` is the 53-bit uniform
//! `(next_u64 >> 11) * 2^-53`. Nothing else consumes the stream, so the
//! layout is reproducible in any language with a ChaCha8 implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::units::dbm_to_watts;
use super::{Gbs, Point, RadioParams, Scenario};
use crate::error::ModelError;

pub const RNG_STREAM: &str = "chacha8-v1";

/// One power class of stations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbsClass {
    pub name: String,
    pub count: usize,
    pub tx_power_dbm: f64,
    pub antenna_height_m: f64,
    /// Ids reserved for this class. Empty means "take the lowest free ids";
    /// otherwise the length must equal `count`.
    #[serde(default)]
    pub ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mix {
    pub classes: Vec<GbsClass>,
}

impl Mix {
    /// One large, two medium and seventeen small stations, with the large
    /// station at id 2 and the medium ones at ids 14 and 19.
    pub fn heterogeneous_default() -> Mix {
        Mix {
            classes: vec![
                GbsClass {
                    name: "large".into(),
                    count: 1,
                    tx_power_dbm: 35.7,
                    antenna_height_m: 20.0,
                    ids: vec![2],
                },
                GbsClass {
                    name: "medium".into(),
                    count: 2,
                    tx_power_dbm: 25.6,
                    antenna_height_m: 15.0,
                    ids: vec![14, 19],
                },
                GbsClass {
                    name: "small".into(),
                    count: 17,
                    tx_power_dbm: 20.0,
                    antenna_height_m: 12.5,
                    ids: vec![],
                },
            ],
        }
    }

    /// Default class parameters with custom counts. With at least two small
    /// stations, the large then medium ones take ids from 2 upward, so ids 1
    /// and M (the default mission endpoints) are small.
    pub fn with_counts(large: usize, medium: usize, small: usize) -> Mix {
        let mut mix = Mix::heterogeneous_default();
        let mut next = 2u32;
        for (class, count) in mix.classes.iter_mut().zip([large, medium, small]) {
            class.count = count;
            class.ids.clear();
            if small >= 2 && class.name != "small" {
                class.ids = (next..next + count as u32).collect();
                next += count as u32;
            }
        }
        mix.classes.retain(|c| c.count > 0);
        mix
    }

    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.count).sum()
    }

    /// Resolve (id, class) pairs, sorted by id.
    fn assign_ids(&self) -> Result<Vec<(u32, &GbsClass)>, ModelError> {
        let total = self.total();
        if total == 0 {
            return Err(ModelError::InvalidMix("mix has zero stations".into()));
        }
        let mut slots: Vec<Option<&GbsClass>> = vec![None; total];
        for class in &self.classes {
            if class.ids.is_empty() {
                continue;
            }
            if class.ids.len() != class.count {
                return Err(ModelError::InvalidMix(format!(
                    "class {} pins {} ids for {} stations",
                    class.name,
                    class.ids.len(),
                    class.count
                )));
            }
            for &id in &class.ids {
                let slot = (id as usize)
                    .checked_sub(1)
                    .and_then(|i| slots.get_mut(i))
                    .ok_or_else(|| ModelError::InvalidMix(format!("id {id} outside 1..={total}")))?;
                if slot.replace(class).is_some() {
                    return Err(ModelError::InvalidMix(format!("id {id} pinned twice")));
                }
            }
        }
        let mut free = (0..total).filter(|&i| slots[i].is_none()).collect::<Vec<_>>().into_iter();
        for class in self.classes.iter().filter(|c| c.ids.is_empty()) {
            for _ in 0..class.count {
                let i = free.next().expect("free slots match unpinned counts");
                slots[i] = Some(class);
            }
        }
        Ok(slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as u32 + 1, c.expect("every slot assigned")))
            .collect())
    }
}

/// Everything needed to draw a scenario besides the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Side of the square deployment region in meters.
    pub region_m: f64,
    pub mix: Mix,
    pub beta0_db: f64,
    pub noise_dbm: f64,
    pub snr_threshold_db: f64,
    pub uav_height_m: f64,
    pub v_max_mps: f64,
    pub t_max_s: f64,
    pub endpoints: Endpoints,
}

/// Where the mission starts and ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Endpoints {
    /// Directly above station 1 and station M.
    FirstLastStation,
    /// Fixed fractions of the region side.
    Fractions { start: [f64; 2], finish: [f64; 2] },
}

impl Default for GenSpec {
    fn default() -> Self {
        GenSpec {
            region_m: 10_000.0,
            mix: Mix::heterogeneous_default(),
            beta0_db: -30.0,
            noise_dbm: -90.0,
            snr_threshold_db: 17.7,
            uav_height_m: 90.0,
            v_max_mps: 50.0,
            t_max_s: 270.0,
            endpoints: Endpoints::FirstLastStation,
        }
    }
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<Scenario, ModelError> {
        if !(self.region_m.is_finite() && self.region_m > 0.0) {
            return Err(ModelError::InvalidMix(format!(
                "region side must be positive (got {})",
                self.region_m
            )));
        }
        let assigned = self.mix.assign_ids()?;
        let radio = RadioParams::from_db(self.beta0_db, self.noise_dbm, self.snr_threshold_db)?;
        let side = self.region_m;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gbs_list: Vec<Gbs> = assigned
            .into_iter()
            .map(|(id, class)| {
                let x = side * rng.gen::<f64>();
                let y = side * rng.gen::<f64>();
                Gbs {
                    id,
                    position: Point::new(x, y),
                    antenna_height: class.antenna_height_m,
                    tx_power: dbm_to_watts(class.tx_power_dbm),
                }
            })
            .collect();
        let at = |f: [f64; 2]| Point::new(f[0] * side, f[1] * side);
        let (start, finish) = match self.endpoints {
            Endpoints::FirstLastStation => {
                let first: &Gbs = gbs_list.first().expect("mix is nonempty");
                let last: &Gbs = gbs_list.last().expect("mix is nonempty");
                (first.position, last.position)
            }
            Endpoints::Fractions { start, finish } => (at(start), at(finish)),
        };
        Ok(Scenario {
            gbs_list,
            start,
            finish,
            uav_height: self.uav_height_m,
            v_max: self.v_max_mps,
            t_max: self.t_max_s,
            radio,
        })
    }
}

/// Draw a scenario with default radio and mission parameters.
pub fn generate_scenario(seed: u64, region_m: f64, mix: &Mix) -> Result<Scenario, ModelError> {
    GenSpec {
        region_m,
        mix: mix.clone(),
        ..GenSpec::default()
    }
    .generate(seed)
}
