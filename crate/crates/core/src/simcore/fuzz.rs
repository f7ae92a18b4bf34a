//! Seeded loop-freedom fuzzing: random graph, random workload, perturbed
//! routing tables, then an audit of the resulting trace.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::audit::{audit, AuditReport};
use super::scenario::{ConsumerSpec, Inconsistency, Mode, SimConfig};
use super::sim::run;
use super::trace::parse_trace;
use crate::control_plane::{AnchorAssignment, Topology};
use crate::error::ConfigError;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FuzzParams {
    pub routers: u32,
    pub horizon: SimTime,
}

impl Default for FuzzParams {
    fn default() -> Self {
        Self {
            routers: 30,
            horizon: SimTime::from_secs(2),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzOutcome {
    pub seed: u64,
    pub severity: f64,
    pub links: usize,
    pub anchors: usize,
    pub consumers: usize,
    pub rate: f64,
    pub report: AuditReport,
}

impl FuzzOutcome {
    /// Hops with non-decreasing distance plus routers forwarding an
    /// instance twice.
    pub fn traversals(&self) -> usize {
        self.report.distance_violations + self.report.revisits
    }
}

/// One RAMP run on a random connected graph whose tables were perturbed
/// with `severity`. Everything random derives from `seed`.
pub fn loop_fuzz(seed: u64, severity: f64, params: FuzzParams) -> Result<FuzzOutcome, ConfigError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c6f_6f70);
    let n = params.routers.max(2);
    let extra = rng.random_range(0..=n as usize);
    let delay = SimTime::from_micros(rng.random_range(500..=5_000));
    let t = Topology::random_connected(n, extra, seed, delay, 1_000_000_000);
    let anchors = rng.random_range(1..=(n as usize / 4).max(1));
    let prefixes = rng.random_range(1..=4);
    let a = AnchorAssignment::random_single_homed(&t, anchors, prefixes, seed);
    let consumers = rng.random_range(1..=(n as usize / 2).max(1));
    let rate = rng.random_range(10.0..100.0);
    let cfg = SimConfig {
        mode: Mode::Ramp,
        consumers: ConsumerSpec::Count(consumers),
        rate,
        cos_per_prefix: rng.random_range(1..=20),
        horizon: params.horizon,
        warmup_fraction: 0.0,
        seed,
        inconsistency: Some(Inconsistency { severity, seed }),
        trace: true,
        ..SimConfig::default()
    };
    let out = run(&t, &a, &cfg)?;
    let text = out.trace.expect("trace enabled");
    let events = parse_trace(&text).expect("simulator emits its own grammar");
    Ok(FuzzOutcome {
        seed,
        severity,
        links: t.links().len(),
        anchors,
        consumers,
        rate,
        report: audit(&events),
    })
}
