//! Benchmark instances. The benches themselves live under `benches/`.

use handover_core::{shortest_time_plan, GenSpec, Mix, Scenario};

/// First connected default-layout instance with `m` stations (large and
/// medium counts scaled from the 1:2:17 mix), with a budget 20% above its
/// fastest mission.
pub fn instance(m: usize) -> Scenario {
    let large = (m / 20).max(1);
    let medium = (m / 10).max(1);
    let spec = GenSpec {
        mix: Mix::with_counts(large, medium, m.saturating_sub(large + medium)),
        ..GenSpec::default()
    };
    (0..1000u64)
        .find_map(|seed| {
            let s = spec.generate(seed).ok()?;
            let fast = shortest_time_plan(&s.with_t_max(f64::MAX)).ok()?;
            Some(s.with_t_max(1.2 * fast.mission_time_s))
        })
        .expect("some seed gives a connected instance")
}
