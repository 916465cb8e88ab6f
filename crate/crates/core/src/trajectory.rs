//! From association sequences to flyable trajectories, and back.
//!
//! The UAV flies start -> above `I_0` -> above `I_1` -> ... -> above `I_N`
//! -> finish at full speed. The handover from `I_{i-1}` to `I_i` happens
//! where the straight segment between the two stations leaves the disk of
//! `I_{i-1}`; when the next station already sits inside that disk the
//! handover happens directly above it.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::TrajectoryError;
use crate::model::{self, units, CoverageDisk, Point, Scenario};
use crate::solver::Plan;

/// Relative slack on disk membership, absorbing rounding at boundary points.
pub const DISK_SLACK: f64 = 1e-9;
/// Relative slack on the speed bound.
pub const SPEED_SLACK: f64 = 1e-9;
/// Absolute slack on the mission-time budget, seconds.
pub const TIME_SLACK_S: f64 = 1e-6;
/// Absolute slack on endpoint positions, meters.
pub const ENDPOINT_SLACK_M: f64 = 1e-6;
/// Consecutive trajectory points closer than this are one waypoint (m).
pub const MERGE_M: f64 = 1e-9;

/// Trajectory vertex. `serving_gbs` serves from this waypoint (inclusive)
/// until the next one (exclusive); the last waypoint keeps its station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub t_s: f64,
    pub xy_m: Point,
    pub serving_gbs: u32,
}

fn resolve_disks(
    scenario: &Scenario,
    association: &[u32],
) -> Result<Vec<CoverageDisk>, TrajectoryError> {
    if association.is_empty() {
        return Err(TrajectoryError::EmptyAssociation);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut disks = Vec::with_capacity(association.len());
    for &id in association {
        if !seen.insert(id) {
            return Err(TrajectoryError::RepeatedGbs(id));
        }
        let gbs = scenario.gbs(id).ok_or(TrajectoryError::UnknownGbs(id))?;
        let radius = model::coverage_radius(gbs, scenario).ok_or(TrajectoryError::NoCoverage(id))?;
        disks.push(CoverageDisk {
            center: gbs.position,
            radius,
        });
    }
    for (pair, ids) in disks.windows(2).zip(association.windows(2)) {
        if pair[0].center.dist(pair[1].center) > pair[0].radius + pair[1].radius {
            return Err(TrajectoryError::DisksDisjoint {
                from: ids[0],
                to: ids[1],
            });
        }
    }
    Ok(disks)
}

/// Point where service moves from disk `from` to the station at `to_center`.
fn handover_point(from: &CoverageDisk, to_center: Point) -> Point {
    let l = from.center.dist(to_center);
    if l == 0.0 {
        return from.center;
    }
    from.center + (to_center - from.center) * (from.radius.min(l) / l)
}

/// Handover locations `u_0 .. u_{N+1}` with `u_0 = start` and
/// `u_{N+1} = finish`.
pub fn handover_points(scenario: &Scenario, association: &[u32]) -> Result<Vec<Point>, TrajectoryError> {
    let disks = resolve_disks(scenario, association)?;
    let mut points = Vec::with_capacity(disks.len() + 1);
    points.push(scenario.start);
    for pair in disks.windows(2) {
        points.push(handover_point(&pair[0], pair[1].center));
    }
    points.push(scenario.finish);
    Ok(points)
}

/// Max-speed polyline over the station tops with a waypoint at every
/// handover location. Hops of at most [`MERGE_M`] (or too short to advance
/// the clock) are merged into a single waypoint.
pub fn build_trajectory(scenario: &Scenario, association: &[u32]) -> Result<Vec<Waypoint>, TrajectoryError> {
    let disks = resolve_disks(scenario, association)?;
    let mut stops: Vec<(Point, u32)> = Vec::with_capacity(2 * disks.len() + 1);
    stops.push((scenario.start, association[0]));
    stops.push((disks[0].center, association[0]));
    for i in 1..disks.len() {
        stops.push((handover_point(&disks[i - 1], disks[i].center), association[i]));
        stops.push((disks[i].center, association[i]));
    }
    stops.push((scenario.finish, association[association.len() - 1]));

    let mut waypoints: Vec<Waypoint> = Vec::with_capacity(stops.len());
    let mut length = 0.0;
    for (xy, serving) in stops {
        if let Some(last) = waypoints.last_mut() {
            let hop = last.xy_m.dist(xy);
            if hop <= MERGE_M || (length + hop) / scenario.v_max <= last.t_s {
                // the start stays put; later waypoints move onto the merged point
                if last.t_s > 0.0 {
                    length += hop;
                    last.xy_m = xy;
                    last.t_s = length / scenario.v_max;
                }
                last.serving_gbs = serving;
                continue;
            }
            length += hop;
        }
        waypoints.push(Waypoint {
            t_s: length / scenario.v_max,
            xy_m: xy,
            serving_gbs: serving,
        });
    }
    Ok(waypoints)
}

/// Mission completion time of the over-the-top trajectory, in closed form.
pub fn mission_time(scenario: &Scenario, association: &[u32]) -> Result<f64, TrajectoryError> {
    let positions = association
        .iter()
        .map(|&id| scenario.gbs(id).map(|g| g.position).ok_or(TrajectoryError::UnknownGbs(id)))
        .collect::<Result<Vec<_>, _>>()?;
    let (first, last) = match (positions.first(), positions.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(TrajectoryError::EmptyAssociation),
    };
    let middle: f64 = positions.windows(2).map(|w| w[1].dist(w[0])).sum();
    Ok(scenario.start.dist(first) / scenario.v_max
        + scenario.finish.dist(last) / scenario.v_max
        + middle / scenario.v_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Trajectory must begin at the start point and end at the finish point.
    Endpoints,
    /// UAV must stay inside the coverage disk of its serving station.
    Coverage,
    /// Serving station must be a station of the scenario with coverage.
    Association,
    /// Speed must not exceed `v_max`.
    Speed,
    /// Mission must complete within `t_max`.
    MissionTime,
    /// Waypoint timestamps must start at zero and strictly increase.
    Timing,
    /// Handover events must reproduce the plan's association sequence.
    HandoverCount,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Endpoints => "endpoints",
            Constraint::Coverage => "coverage",
            Constraint::Association => "association",
            Constraint::Speed => "speed",
            Constraint::MissionTime => "mission_time",
            Constraint::Timing => "timing",
            Constraint::HandoverCount => "handover_count",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    /// Index of the offending waypoint, when there is one.
    pub waypoint: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.waypoint {
            Some(k) => write!(f, "{} violated at waypoint {k}: {}", self.constraint, self.detail),
            None => write!(f, "{} violated: {}", self.constraint, self.detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub time_s: f64,
    pub location_m: Point,
    pub from_gbs: u32,
    pub to_gbs: u32,
    /// Service switched while still strictly inside the old disk.
    pub interior: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightTrace {
    pub handover_events: Vec<HandoverEvent>,
    /// Minimum serving-station SNR over all segment endpoints (linear).
    pub min_snr_linear: f64,
    pub feasible: bool,
    /// First violated constraint in flight order, if any.
    pub violation: Option<Violation>,
}

impl FlightTrace {
    pub fn min_snr_db(&self) -> f64 {
        units::linear_to_db(self.min_snr_linear)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

/// Check a plan against the continuous-time mission constraints.
///
/// Coverage is checked at both ends of every segment, which suffices since
/// the distance to a fixed center is convex along a straight segment.
pub fn validate_plan(scenario: &Scenario, plan: &Plan) -> FlightTrace {
    let disks: BTreeMap<u32, CoverageDisk> = scenario.coverage_disks();
    let wps = &plan.waypoints;
    let mut violation: Option<Violation> = None;
    let mut flag = |constraint: Constraint, waypoint: Option<usize>, detail: String| {
        if violation.is_none() {
            violation = Some(Violation {
                constraint,
                waypoint,
                detail,
            });
        }
    };

    let (Some(first), Some(last)) = (wps.first(), wps.last()) else {
        flag(Constraint::Endpoints, None, "plan has no waypoints".into());
        return FlightTrace {
            handover_events: Vec::new(),
            min_snr_linear: f64::NAN,
            feasible: false,
            violation,
        };
    };

    if first.xy_m.dist(scenario.start) > ENDPOINT_SLACK_M {
        flag(
            Constraint::Endpoints,
            Some(0),
            format!("trajectory starts at {:?}, not at {:?}", first.xy_m, scenario.start),
        );
    }
    if first.t_s.abs() > TIME_SLACK_S {
        flag(Constraint::Timing, Some(0), format!("first timestamp is {} s", first.t_s));
    }

    let mut min_snr = f64::INFINITY;
    let mut events = Vec::new();
    let mut sequence = vec![first.serving_gbs];
    for (k, wp) in wps.iter().enumerate() {
        let Some(disk) = disks.get(&wp.serving_gbs) else {
            flag(
                Constraint::Association,
                Some(k),
                format!("GBS {} cannot serve at altitude H", wp.serving_gbs),
            );
            continue;
        };
        let gbs = scenario.gbs(wp.serving_gbs).expect("disk implies station");

        if k > 0 {
            let prev = &wps[k - 1];
            if prev.serving_gbs != wp.serving_gbs {
                let interior = disks
                    .get(&prev.serving_gbs)
                    .is_some_and(|d| d.center.dist(wp.xy_m) < d.radius * (1.0 - DISK_SLACK));
                events.push(HandoverEvent {
                    time_s: wp.t_s,
                    location_m: wp.xy_m,
                    from_gbs: prev.serving_gbs,
                    to_gbs: wp.serving_gbs,
                    interior,
                });
                sequence.push(wp.serving_gbs);
            }
        }

        // segment [k, k+1] (or the final point) served by this waypoint's station
        let ends: &[Waypoint] = if k + 1 < wps.len() { &wps[k..k + 2] } else { &wps[k..k + 1] };
        for (j, end) in ends.iter().enumerate() {
            let d = disk.center.dist(end.xy_m);
            if d > disk.radius * (1.0 + DISK_SLACK) {
                flag(
                    Constraint::Coverage,
                    Some(k + j),
                    format!(
                        "{:.3} m from GBS {} whose coverage radius is {:.3} m",
                        d, wp.serving_gbs, disk.radius
                    ),
                );
            }
            min_snr = min_snr.min(model::snr(gbs, end.xy_m, scenario));
        }

        if let Some(next) = wps.get(k + 1) {
            let dt = next.t_s - wp.t_s;
            if !(dt > 0.0) {
                flag(
                    Constraint::Timing,
                    Some(k + 1),
                    format!("timestamp does not increase ({} s -> {} s)", wp.t_s, next.t_s),
                );
            } else {
                let speed = wp.xy_m.dist(next.xy_m) / dt;
                if speed > scenario.v_max * (1.0 + SPEED_SLACK) {
                    flag(
                        Constraint::Speed,
                        Some(k + 1),
                        format!("segment speed {speed:.6} m/s exceeds {} m/s", scenario.v_max),
                    );
                }
            }
        }
    }

    if last.xy_m.dist(scenario.finish) > ENDPOINT_SLACK_M {
        flag(
            Constraint::Endpoints,
            Some(wps.len() - 1),
            format!("trajectory ends at {:?}, not at {:?}", last.xy_m, scenario.finish),
        );
    }
    if last.t_s > scenario.t_max + TIME_SLACK_S {
        flag(
            Constraint::MissionTime,
            Some(wps.len() - 1),
            format!("mission takes {:.6} s, budget is {} s", last.t_s, scenario.t_max),
        );
    }
    if events.len() != plan.handovers as usize || sequence != plan.association {
        flag(
            Constraint::HandoverCount,
            None,
            format!(
                "trajectory realizes {} handovers via {:?}; plan claims {} via {:?}",
                events.len(),
                sequence,
                plan.handovers,
                plan.association
            ),
        );
    }

    FlightTrace {
        handover_events: events,
        min_snr_linear: min_snr,
        feasible: violation.is_none(),
        violation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t_s: f64,
    pub xy_m: Point,
    pub serving_gbs: u32,
    /// Linear SNR from the serving station.
    pub snr: f64,
}

/// Sample the trajectory every `dt_s` seconds, always including the final
/// instant.
pub fn sample_trajectory(scenario: &Scenario, waypoints: &[Waypoint], dt_s: f64) -> Vec<TraceSample> {
    assert!(dt_s > 0.0, "sample period must be positive");
    let Some(last) = waypoints.last() else {
        return Vec::new();
    };
    let at = |t: f64, seg: usize| -> TraceSample {
        let (a, b) = (&waypoints[seg], waypoints.get(seg + 1));
        let xy = match b {
            Some(b) if b.t_s > a.t_s => a.xy_m.lerp(b.xy_m, ((t - a.t_s) / (b.t_s - a.t_s)).clamp(0.0, 1.0)),
            _ => a.xy_m,
        };
        let snr = scenario
            .gbs(a.serving_gbs)
            .map_or(f64::NAN, |g| model::snr(g, xy, scenario));
        TraceSample {
            t_s: t,
            xy_m: xy,
            serving_gbs: a.serving_gbs,
            snr,
        }
    };

    let mut out = Vec::new();
    let mut seg = 0;
    let mut i: u64 = 0;
    loop {
        let t = i as f64 * dt_s;
        if t >= last.t_s {
            break;
        }
        while seg + 1 < waypoints.len() && waypoints[seg + 1].t_s <= t {
            seg += 1;
        }
        out.push(at(t, seg));
        i += 1;
    }
    out.push(at(last.t_s, waypoints.len() - 1));
    out
}

/// CSV with columns `t_s,x_m,y_m,serving_gbs,snr_db`.
pub fn samples_to_csv(samples: &[TraceSample]) -> String {
    let mut out = String::from("t_s,x_m,y_m,serving_gbs,snr_db\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.t_s,
            s.xy_m.x,
            s.xy_m.y,
            s.serving_gbs,
            units::linear_to_db(s.snr)
        );
    }
    out
}
