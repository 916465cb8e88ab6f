//! Acceptance gate: eight end-to-end criteria, one PASS/FAIL line each.
//! Exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use handover_core::model::units::db_to_linear;
use handover_core::solver::exhaustive_oracle;
use handover_core::trajectory::{mission_time, sample_trajectory, DISK_SLACK};
use handover_core::{
    build_graph, coverage_radius, genetic_plan, shortest_time_plan, snr, solve, validate_plan, Endpoints,
    GaConfig, Gbs, GenSpec, Method, Mix, Path as GraphPath, Plan, Point, Scenario, SolverConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("coverage radius vs bisection", radius_matches_bisection),
        ("optimality vs exhaustive search", matches_oracle),
        ("distinct ids, length <= M", associations_are_simple),
        ("constructed plans validate", plans_validate),
        ("dominance over baselines", beats_baselines),
        ("sweep trends", sweep_trends),
        ("scaling M=50 -> M=100", scaling),
        ("closed-form time and sampled SNR", time_and_sampled_snr),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {}. {} ({:.2?}): {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            t.elapsed(),
            result.detail
        );
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1?}",
        criteria.len() - failed,
        criteria.len(),
        total.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

// 1 -------------------------------------------------------------------------

fn radius_matches_bisection() -> Outcome {
    let s = GenSpec::default().generate(0).unwrap();
    let classes = [("small", 20.0, 12.5, 1300.9), ("medium", 25.6, 15.0, 2482.0), ("large", 35.7, 20.0, 7943.0)];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, dbm, h, expected) in classes {
        let g = Gbs {
            id: 1,
            position: Point::new(0.0, 0.0),
            antenna_height: h,
            tx_power: db_to_linear(dbm - 30.0),
        };
        let r = coverage_radius(&g, &s).expect("class has coverage");
        // largest d with SNR(d) >= threshold, by bisection on [0, 1e6]
        let (mut lo, mut hi) = (0.0f64, 1e6f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if snr(&g, Point::new(mid, 0.0), &s) >= s.radio.snr_threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let err = (r - lo).abs();
        worst = worst.max(err);
        pass &= err <= 1e-6 && (r - expected).abs() < 0.05;
        parts.push(format!("{name} {r:.1} m"));
    }
    outcome(pass, format!("{}; max |r - bisection| = {worst:.1e} m", parts.join(", ")))
}

// 2 -------------------------------------------------------------------------

/// Small heterogeneous instance with a budget between the fastest time and
/// 1.6 times it, so the time constraint binds on many instances.
fn small_instance(seed: u64) -> Scenario {
    let m = 4 + (seed % 5) as usize;
    let base = GenSpec {
        region_m: 5_000.0,
        mix: Mix::with_counts(0, 1, m - 1),
        ..GenSpec::default()
    }
    .generate(seed)
    .unwrap();
    let slack: f64 = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed).gen_range(0.0..0.6);
    match shortest_time_plan(&base.with_t_max(f64::MAX)) {
        Ok(fast) => base.with_t_max(fast.mission_time_s * (1.0 + slack)),
        Err(_) => base,
    }
}

fn matches_oracle() -> Outcome {
    let start = Instant::now();
    let config = SolverConfig {
        k_candidates: 50,
        max_dual_iters: 200,
        ..SolverConfig::default()
    };
    let (mut equal, mut below, mut feasible, mut binding) = (0, 0, 0, 0);
    let mut misses = Vec::new();
    for seed in 0..100u64 {
        let s = small_instance(seed);
        let oracle = exhaustive_oracle(&s);
        let ours = solve(&s, &config);
        match (&oracle, &ours) {
            (Ok(o), Ok(p)) => {
                feasible += 1;
                if shortest_time_plan(&s).is_ok_and(|f| f.handovers > o.handovers) {
                    binding += 1;
                }
                if p.handovers < o.handovers {
                    below += 1;
                } else if p.handovers == o.handovers {
                    equal += 1;
                } else {
                    misses.push(seed);
                }
            }
            (Err(a), Err(b)) if a.is_infeasible() && b.is_infeasible() => equal += 1,
            _ => misses.push(seed),
        }
    }
    let elapsed = start.elapsed();
    outcome(
        below == 0 && equal >= 90 && elapsed < Duration::from_secs(60),
        format!(
            "{equal}/100 equal, {below} below optimum, {feasible} feasible ({binding} where the fastest route is not optimal), misses {misses:?}, {elapsed:.1?}"
        ),
    )
}

// 3, 4 ----------------------------------------------------------------------

/// Wide random family: 1..=30 stations, mixed classes, varied region,
/// endpoints, budget and threshold.
fn fuzz_scenario(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let m: usize = rng.gen_range(1..=30);
    let large = rng.gen_range(0..=m.min(2));
    let medium = rng.gen_range(0..=(m - large).min(4));
    let endpoints = if rng.gen_bool(0.5) {
        Endpoints::FirstLastStation
    } else {
        Endpoints::Fractions {
            start: [rng.gen(), rng.gen()],
            finish: [rng.gen(), rng.gen()],
        }
    };
    GenSpec {
        region_m: rng.gen_range(500.0..12_000.0),
        mix: Mix::with_counts(large, medium, m - large - medium),
        snr_threshold_db: rng.gen_range(10.0..25.0),
        t_max_s: rng.gen_range(20.0..600.0),
        endpoints,
        ..GenSpec::default()
    }
    .generate(seed)
    .unwrap()
}

fn fuzz_ga(seed: u64) -> GaConfig {
    GaConfig {
        population_size: 40,
        generations: 40,
        seed,
        ..GaConfig::default()
    }
}

fn all_plans(s: &Scenario, seed: u64) -> Vec<Plan> {
    [
        solve(s, &SolverConfig::default()),
        shortest_time_plan(s),
        genetic_plan(s, &fuzz_ga(seed)),
    ]
    .into_iter()
    .filter_map(Result::ok)
    .collect()
}

fn associations_are_simple() -> Outcome {
    let (mut plans, mut bad) = (0, Vec::new());
    for seed in 0..1000u64 {
        let s = fuzz_scenario(seed);
        for p in all_plans(&s, seed) {
            plans += 1;
            let mut ids = p.association.clone();
            ids.sort_unstable();
            ids.dedup();
            if ids.len() != p.association.len() || p.association.len() > s.gbs_list.len() {
                bad.push((seed, p.solver_meta.method));
            }
        }
    }
    outcome(
        bad.is_empty() && plans > 0,
        format!("{plans} plans over 1000 scenarios, {} violations {bad:?}", bad.len()),
    )
}

/// Independent re-check of one plan; `None` when everything holds.
fn check_plan(s: &Scenario, p: &Plan) -> Option<String> {
    let trace = validate_plan(s, p);
    if !trace.feasible {
        return Some(format!("validator: {:?}", trace.violation));
    }
    let wps = &p.waypoints;
    let (first, last) = (wps.first()?, wps.last()?);
    if first.xy_m.dist(s.start) > 1e-6 || last.xy_m.dist(s.finish) > 1e-6 {
        return Some("endpoints".into());
    }
    if last.t_s > s.t_max + 1e-6 {
        return Some(format!("time {} > {}", last.t_s, s.t_max));
    }
    for w in wps.windows(2) {
        let speed = w[0].xy_m.dist(w[1].xy_m) / (w[1].t_s - w[0].t_s);
        if ((speed - s.v_max) / s.v_max).abs() > 1e-9 {
            return Some(format!("segment speed {speed}"));
        }
    }
    let disks = s.coverage_disks();
    for (k, w) in wps.iter().enumerate() {
        let d = disks.get(&w.serving_gbs)?;
        let ends = if k + 1 < wps.len() { &wps[k..k + 2] } else { &wps[k..k + 1] };
        for e in ends {
            if d.center.dist(e.xy_m) > d.radius * (1.0 + DISK_SLACK) {
                return Some(format!("waypoint {k} outside disk of {}", w.serving_gbs));
            }
        }
    }
    if trace.handover_events.len() as u32 != p.handovers {
        return Some("event count".into());
    }
    None
}

fn plans_validate() -> Outcome {
    let (mut plans, mut bad) = (0, Vec::new());
    for seed in 0..1000u64 {
        let s = fuzz_scenario(seed);
        for p in all_plans(&s, seed) {
            if !p.solver_meta.feasible {
                continue;
            }
            plans += 1;
            if let Some(why) = check_plan(&s, &p) {
                bad.push(format!("seed {seed} {}: {why}", p.solver_meta.method));
            }
        }
    }
    outcome(
        bad.is_empty() && plans > 0,
        format!("{plans} feasible plans checked, {} failures {:?}", bad.len(), bad.iter().take(5).collect::<Vec<_>>()),
    )
}

// 5 -------------------------------------------------------------------------

fn beats_baselines() -> Outcome {
    let start = Instant::now();
    let (mut n, mut strict, mut tried) = (0, 0, 0);
    let mut losses = Vec::new();
    for seed in 0..500u64 {
        if n == 50 {
            break;
        }
        tried += 1;
        let s = GenSpec::default().generate(seed).unwrap();
        let (Ok(p), Ok(st), Ok(ga)) = (
            solve(&s, &SolverConfig::default()),
            shortest_time_plan(&s),
            genetic_plan(&s, &GaConfig { seed, ..GaConfig::default() }),
        ) else {
            continue;
        };
        n += 1;
        if p.handovers > st.handovers || p.handovers > ga.handovers {
            losses.push(seed);
        }
        if p.handovers < st.handovers {
            strict += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        n == 50 && losses.is_empty() && 2 * strict >= n && elapsed < Duration::from_secs(120),
        format!(
            "{n} all-feasible instances from {tried} seeds, strictly fewer handovers than shortest-time on {strict}, losses {losses:?}, {elapsed:.1?}"
        ),
    )
}

// 6 -------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct Row {
    axis_value: f64,
    method: String,
    handovers: Option<u32>,
}

fn run_sweep_cli(scenario: &Path, axis: &str, values: &[f64], out: &Path) -> Vec<Row> {
    let values: Vec<String> = values.iter().map(f64::to_string).collect();
    let status = Command::new(env!("CARGO_BIN_EXE_handover"))
        .args(["sweep", "--scenario", scenario.to_str().unwrap(), "--axis", axis])
        .args(["--values", &values.join(","), "--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    csv::Reader::from_path(out)
        .unwrap()
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap()
}

/// Handover column for one method, infeasible cells as `u32::MAX`.
fn curve(rows: &[Row], method: &str) -> Vec<(f64, u32)> {
    rows.iter()
        .filter(|r| r.method == method)
        .map(|r| (r.axis_value, r.handovers.unwrap_or(u32::MAX)))
        .collect()
}

fn show(c: &[(f64, u32)]) -> String {
    let cells: Vec<String> = c
        .iter()
        .map(|&(_, h)| if h == u32::MAX { "-".into() } else { h.to_string() })
        .collect();
    cells.join(" ")
}

fn sweep_trends() -> Outcome {
    // first seed where every method is feasible at the reference setting
    let seed = (0..100u64)
        .find(|&seed| {
            let s = GenSpec::default().generate(seed).unwrap();
            solve(&s, &SolverConfig::default()).is_ok()
                && shortest_time_plan(&s).is_ok()
                && genetic_plan(&s, &GaConfig::default()).is_ok()
        })
        .expect("a feasible seed");
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    GenSpec::default().generate(seed).unwrap().save(&scenario).unwrap();

    let budgets: Vec<f64> = (0..=20).map(|i| 150.0 + 15.0 * f64::from(i)).collect();
    let rows = run_sweep_cli(&scenario, "t_max", &budgets, &dir.path().join("t_max.csv"));
    let proposed = curve(&rows, Method::Proposed.as_str());
    let fastest = curve(&rows, Method::ShortestTime.as_str());
    let nonincreasing = proposed.windows(2).all(|w| w[1].1 <= w[0].1);
    let feasible_fast: Vec<u32> = fastest.iter().map(|c| c.1).filter(|&h| h != u32::MAX).collect();
    let constant = !feasible_fast.is_empty()
        && feasible_fast.iter().all(|&h| h == feasible_fast[0])
        && fastest.windows(2).all(|w| w[1].1 <= w[0].1);

    let thresholds: Vec<f64> = (0..=15).map(|i| 10.0 + f64::from(i)).collect();
    let rows = run_sweep_cli(&scenario, "snr_threshold_db", &thresholds, &dir.path().join("snr.csv"));
    let mut snr_ok = true;
    let mut snr_curves = Vec::new();
    for m in [Method::Proposed, Method::ShortestTime, Method::Genetic] {
        let c = curve(&rows, m.as_str());
        let ok = c.windows(2).all(|w| w[1].1 >= w[0].1);
        snr_ok &= ok;
        snr_curves.push(format!("{m}{} [{}]", if ok { "" } else { " NOT nondecreasing" }, show(&c)));
    }
    outcome(
        nonincreasing && constant && snr_ok,
        format!(
            "seed {seed}; t_max 150..450: proposed [{}]{}, shortest_time [{}]{}; snr 10..25 dB: {}",
            show(&proposed),
            if nonincreasing { "" } else { " NOT nonincreasing" },
            show(&fastest),
            if constant { "" } else { " NOT constant" },
            snr_curves.join("; ")
        ),
    )
}

// 7 -------------------------------------------------------------------------

/// Seeded instance of `m` stations in the default class proportions, with a
/// budget 20% above the fastest mission.
fn scaled_instance(m: usize) -> Scenario {
    let large = (m / 20).max(1);
    let medium = (m / 10).max(1);
    let spec = GenSpec {
        mix: Mix::with_counts(large, medium, m - large - medium),
        ..GenSpec::default()
    };
    (0..100u64)
        .find_map(|seed| {
            let s = spec.generate(seed).unwrap();
            let fast = shortest_time_plan(&s.with_t_max(f64::MAX)).ok()?;
            Some(s.with_t_max(1.2 * fast.mission_time_s))
        })
        .expect("a connected instance")
}

fn time_solve(s: &Scenario, config: &SolverConfig) -> (Duration, Plan) {
    let mut best = Duration::MAX;
    let mut plan = None;
    for _ in 0..3 {
        let t = Instant::now();
        let p = solve(s, config).expect("feasible by construction");
        best = best.min(t.elapsed());
        plan = Some(p);
    }
    (best, plan.unwrap())
}

fn scaling() -> Outcome {
    let config = SolverConfig {
        k_candidates: 50,
        ..SolverConfig::default()
    };
    let (t50, p50) = time_solve(&scaled_instance(50), &config);
    let (t100, p100) = time_solve(&scaled_instance(100), &config);
    let ratio = t100.as_secs_f64() / t50.as_secs_f64().max(1e-9);
    outcome(
        t100 < Duration::from_secs(5) && ratio < 30.0,
        format!(
            "M=50 {t50:.2?} (N={}), M=100 {t100:.2?} (N={}, {} dual iterations), ratio {ratio:.1}",
            p50.handovers, p100.handovers, p100.solver_meta.dual_iterations
        ),
    )
}

// 8 -------------------------------------------------------------------------

/// Random start-to-finish walk on the coverage graph, if one is found.
fn random_association(s: &Scenario, rng: &mut ChaCha8Rng) -> Option<Vec<u32>> {
    let g = build_graph(s);
    let mut path = vec![g.start()];
    loop {
        let here = *path.last().unwrap();
        let next: Vec<usize> = g
            .neighbors(here)
            .iter()
            .map(|e| e.to)
            .filter(|&v| v != g.start() && !path.contains(&v))
            .filter(|&v| !(here == g.start() && v == g.finish()))
            .collect();
        if next.is_empty() {
            return None;
        }
        let finish_ok = next.contains(&g.finish());
        let v = if finish_ok && rng.gen_bool(0.3) {
            g.finish()
        } else {
            next[rng.gen_range(0..next.len())]
        };
        path.push(v);
        if v == g.finish() {
            let assoc = g.association(&GraphPath::new(path));
            return Some(assoc);
        }
    }
}

fn time_and_sampled_snr() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut checked, mut worst_rel, mut time_bad) = (0, 0.0f64, 0);
    let (mut samples, mut dips, mut min_margin) = (0usize, 0, f64::INFINITY);
    let mut seed = 0u64;
    while checked < 1000 && seed < 100_000 {
        let s = fuzz_scenario(seed).with_t_max(f64::MAX);
        seed += 1;
        let Some(assoc) = random_association(&s, &mut rng) else {
            continue;
        };
        checked += 1;
        let g = build_graph(&s);
        let path = g.path_from_association(&assoc).expect("walk is a graph path");
        let closed = mission_time(&s, &assoc).unwrap();
        let graph_time = g.path_time(&path, s.v_max).unwrap();
        let rel = (closed - graph_time).abs() / graph_time.max(f64::MIN_POSITIVE);
        worst_rel = worst_rel.max(rel);
        if rel > 1e-9 {
            time_bad += 1;
        }

        let plan = Plan::from_association(&s, &assoc, handover_core::SolverMeta::new(Method::Proposed)).unwrap();
        if !validate_plan(&s, &plan).feasible {
            continue;
        }
        let rho = s.radio.snr_threshold;
        for smp in sample_trajectory(&s, &plan.waypoints, 1e-3) {
            samples += 1;
            let margin = smp.snr / rho - 1.0;
            min_margin = min_margin.min(margin);
            if smp.snr < rho * (1.0 - 1e-9) {
                dips += 1;
            }
        }
    }
    outcome(
        checked == 1000 && time_bad == 0 && dips == 0,
        format!(
            "{checked} associations, max relative time gap {worst_rel:.1e}; {samples} SNR samples at 1 ms, {dips} below threshold (min relative margin {min_margin:.1e})"
        ),
    )
}
