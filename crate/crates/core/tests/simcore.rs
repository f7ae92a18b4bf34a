use std::collections::BTreeMap;

use ramp_core::control_plane::{AnchorAssignment, RouterId, Topology};
use ramp_core::names::NamePrefix;
use ramp_core::simcore::{
    audit, parse_trace, run, CacheMode, ConsumerSpec, Inconsistency, LinkFailure, Mode, SimConfig, TableKind,
};
use ramp_core::time::SimTime;

const GBPS: u64 = 1_000_000_000;

fn anchored(t: &Topology, anchor: u32, prefix: &str) -> AnchorAssignment {
    let mut a = AnchorAssignment::new();
    a.announce(RouterId(anchor), NamePrefix::parse(prefix).unwrap()).unwrap();
    let _ = t;
    a
}

fn cfg(mode: Mode, consumers: &[u32], rate: f64) -> SimConfig {
    SimConfig {
        mode,
        consumers: ConsumerSpec::Routers(consumers.iter().map(|&r| RouterId(r)).collect()),
        rate,
        warmup_fraction: 0.0,
        trace: true,
        ..SimConfig::default()
    }
}

#[test]
fn two_router_delay_is_propagation_plus_serialization() {
    let t = Topology::line(2, SimTime::from_millis(5), GBPS);
    let a = anchored(&t, 1, "/v");
    for mode in [Mode::Ramp, Mode::Ndn] {
        let out = run(&t, &a, &cfg(mode, &[0], 1.0)).unwrap();
        let m = &out.metrics;
        // Interest out, Data back, over one 5 ms link at 1 Gb/s.
        let expect_ms = 2.0 * 5.0 + ((64 + 1064) * 8) as f64 / GBPS as f64 * 1e3;
        assert!(m.completed > 10, "{mode}: {} completions", m.completed);
        for d in &m.delays_ms {
            assert!((d - expect_ms).abs() < 1e-9, "{mode}: delay {d} vs {expect_ms}");
        }
    }
}

#[test]
fn identical_inputs_give_identical_traces_and_metrics() {
    let t = Topology::random_connected(12, 6, 3, SimTime::from_millis(2), GBPS);
    let a = AnchorAssignment::random_single_homed(&t, 3, 4, 9);
    for mode in [Mode::Ramp, Mode::Ndn] {
        let mut c = cfg(mode, &[], 50.0);
        c.consumers = ConsumerSpec::Count(5);
        c.horizon = SimTime::from_secs(3);
        c.cache = CacheMode::Lru(20);
        let x = run(&t, &a, &c).unwrap();
        let y = run(&t, &a, &c).unwrap();
        assert_eq!(x.trace, y.trace);
        assert_eq!(format!("{:?}", x.metrics), format!("{:?}", y.metrics));
        c.seed += 1;
        let z = run(&t, &a, &c).unwrap();
        assert_ne!(x.trace, z.trace);
    }
}

#[test]
fn both_modes_draw_the_same_requests() {
    let t = Topology::random_connected(15, 8, 5, SimTime::from_millis(3), GBPS);
    let a = AnchorAssignment::random_single_homed(&t, 4, 5, 2);
    let mut c = cfg(Mode::Ramp, &[], 80.0);
    c.consumers = ConsumerSpec::Count(6);
    c.horizon = SimTime::from_secs(4);
    c.trace = false;
    let r = run(&t, &a, &c).unwrap();
    c.mode = Mode::Ndn;
    let n = run(&t, &a, &c).unwrap();
    assert_eq!(r.consumers, n.consumers);
    assert_eq!(r.metrics.requests, n.metrics.requests);
}

#[test]
fn pit_occupancy_follows_littles_law() {
    let d = SimTime::from_millis(10);
    let t = Topology::line(2, d, GBPS);
    let a = anchored(&t, 1, "/v");
    let mut c = cfg(Mode::Ndn, &[0], 2000.0);
    c.trace = false;
    c.horizon = SimTime::from_secs(10);
    c.warmup_fraction = 0.1;
    let m = run(&t, &a, &c).unwrap().metrics;
    // Each Interest holds a PIT entry at the consumer's router for one
    // round trip; the anchor answers without keeping state.
    let window = (c.horizon.as_secs_f64()) * (1.0 - c.warmup_fraction);
    let lambda = m.interests_sent[&RouterId(0)] as f64 / window;
    let rtt = 2.0 * d.as_secs_f64() + ((64 + 1064) * 8) as f64 / GBPS as f64;
    let expect = lambda * rtt;
    let got = m.tables[&RouterId(0)].pit;
    assert!((got - expect).abs() <= 0.1 * expect, "PIT {got} vs {expect}");
    assert_eq!(m.tables[&RouterId(1)].pit, 0.0);
}

#[test]
fn lookup_counts_match_per_hop_steps() {
    // Consumer at 0, anchor at 3: three forwarding routers.
    let t = Topology::line(4, SimTime::from_millis(1), GBPS);
    let a = anchored(&t, 3, "/v");
    let h = 3.0;

    let mut c = cfg(Mode::Ndn, &[0], 5.0);
    c.trace = false;
    let n = run(&t, &a, &c).unwrap().metrics;
    let [prt, fab, lsat, fib, pit] = n.lookups_per_retrieval();
    assert_eq!((prt, fab, lsat), (0.0, 0.0, 0.0));
    assert_eq!(fib, h);
    assert_eq!(pit, 2.0 * h);
    assert_eq!(n.mean_path_hops(), h);

    c.mode = Mode::Ramp;
    let r = run(&t, &a, &c).unwrap().metrics;
    assert!(r.retrievals > 50);
    assert_eq!(r.lookups.prt, r.retrievals);
    // Only the first Interest of the flow consults the FAB.
    assert_eq!(r.lookups.fab, h as u64);
    assert_eq!(r.lookups.lsat, 2 * h as u64 * r.retrievals);
    assert_eq!((r.lookups.fib, r.lookups.pit), (0, 0));
}

#[test]
fn ramp_prt_and_fab_sizes_are_constant() {
    let t = Topology::random_connected(10, 5, 1, SimTime::from_millis(2), GBPS);
    let a = AnchorAssignment::random_single_homed(&t, 3, 7, 4);
    let mut c = cfg(Mode::Ramp, &[], 100.0);
    c.consumers = ConsumerSpec::Count(4);
    c.horizon = SimTime::from_secs(2);
    c.trace = false;
    let m = run(&t, &a, &c).unwrap().metrics;
    for (r, tm) in &m.tables {
        assert_eq!(tm.prt, 21.0);
        // An anchor keeps no FAB entry for itself.
        let reachable = a.anchors().filter(|x| x != r).count();
        assert_eq!(tm.fab, reachable as f64);
    }
    assert_eq!(m.mean_table(TableKind::Pit), 0.0);
}

#[test]
fn retransmissions_stop_after_the_cap() {
    // Round trip of 10 s against a 1 s timer: every request gives up.
    let t = Topology::line(2, SimTime::from_secs(5), GBPS);
    let a = anchored(&t, 1, "/v");
    let mut c = cfg(Mode::Ndn, &[0], 2.0);
    c.horizon = SimTime::from_secs(20);
    // Wide catalog, so late Data never meets a fresh request for its name.
    c.cos_per_prefix = 1_000_000;
    let out = run(&t, &a, &c).unwrap();
    let ev = parse_trace(out.trace.as_deref().unwrap()).unwrap();
    let mut emissions: BTreeMap<String, u64> = BTreeMap::new();
    let mut giveups = 0;
    for e in &ev {
        match e.kind.as_str() {
            "request" => {
                assert!(e.num("attempt").unwrap() <= 3);
                let name = e.get("name").unwrap().to_string();
                if e.num("attempt") == Some(0) {
                    emissions.insert(name.clone(), 0);
                }
                *emissions.get_mut(&name).unwrap() += 1;
            }
            "giveup" => {
                giveups += 1;
                assert_eq!(emissions[e.get("name").unwrap()], 4);
            }
            _ => {}
        }
    }
    assert!(giveups > 0);
    assert_eq!(out.metrics.completed, 0);
    assert_eq!(out.metrics.failed, out.metrics.requests - count_open(&ev));
}

/// Requests still waiting at the horizon.
fn count_open(ev: &[ramp_core::simcore::TraceEvent]) -> u64 {
    let mut open: BTreeMap<String, u64> = BTreeMap::new();
    for e in ev {
        let name = e.get("name").map(str::to_string);
        match (e.kind.as_str(), name) {
            ("request", Some(n)) if e.num("attempt") == Some(0) => {
                open.insert(n, 1);
            }
            ("join", Some(n)) => *open.get_mut(&n).unwrap() += 1,
            ("giveup" | "complete", Some(n)) => {
                open.remove(&n);
            }
            _ => {}
        }
    }
    open.values().sum()
}

#[test]
fn link_failure_error_reaches_the_consumer_and_it_retries() {
    // o=0, a=1, b=2, c=3 on the short path; 0-4-5-6-3 as a detour.
    let d = SimTime::from_millis(4);
    let mut t = Topology::line(4, d, GBPS);
    for r in 4..7 {
        t.add_router(RouterId(r)).unwrap();
    }
    for (x, y) in [(0, 4), (4, 5), (5, 6), (6, 3)] {
        t.add_link(RouterId(x), RouterId(y), d, GBPS).unwrap();
    }
    let a = anchored(&t, 3, "/v");
    let fail_at = SimTime::from_millis(1500);
    let mut c = cfg(Mode::Ramp, &[0], 50.0);
    c.horizon = SimTime::from_secs(3);
    c.link_failures = vec![LinkFailure {
        at: fail_at,
        a: RouterId(2),
        b: RouterId(3),
    }];
    let out = run(&t, &a, &c).unwrap();
    let ev = parse_trace(out.trace.as_deref().unwrap()).unwrap();

    let notify = ev
        .iter()
        .find(|e| e.kind == "notify" && e.get("code") == Some("link-failure"))
        .expect("consumer is told about the failure");
    let hop = d + SimTime::serialization(64 * 8, GBPS);
    assert_eq!(notify.time, fail_at + hop + hop);
    assert_eq!(notify.router, Some(RouterId(0)));

    let retries: Vec<_> = ev
        .iter()
        .filter(|e| e.kind == "request" && e.time == notify.time && e.num("attempt").unwrap() >= 1)
        .collect();
    assert!(!retries.is_empty());
    // Retransmissions take the detour and complete.
    for r in &retries {
        let tag = r.get("tag").unwrap();
        let first_hop = ev
            .iter()
            .find(|e| e.kind == "interest" && e.get("tag") == Some(tag))
            .unwrap();
        assert_eq!(first_hop.num("to"), Some(4));
        assert!(ev.iter().any(|e| e.kind == "deliver" && e.get("tag") == Some(tag)));
    }
    assert!(audit(&ev).is_clean());
}

#[test]
fn random_topologies_pass_the_trace_audit() {
    for seed in 0..6 {
        let t = Topology::random_connected(8, 4, seed, SimTime::from_millis(1), GBPS);
        let a = AnchorAssignment::random_single_homed(&t, 2, 3, seed);
        for (mode, cache) in [(Mode::Ramp, CacheMode::None), (Mode::Ramp, CacheMode::Lru(5)), (Mode::Ndn, CacheMode::Lru(5))] {
            let mut c = cfg(mode, &[], 40.0);
            c.consumers = ConsumerSpec::Count(4);
            c.horizon = SimTime::from_secs(2);
            c.cache = cache;
            c.seed = seed;
            let out = run(&t, &a, &c).unwrap();
            let ev = parse_trace(out.trace.as_deref().unwrap()).unwrap();
            let rep = audit(&ev);
            assert!(rep.is_clean(), "seed {seed} {mode} {cache}: {rep:?}");
            assert!(rep.delivered > 0);
        }
    }
}

#[test]
fn inconsistent_routes_never_loop() {
    for seed in 0..8 {
        let t = Topology::random_connected(10, 6, seed, SimTime::from_millis(1), GBPS);
        let a = AnchorAssignment::random_single_homed(&t, 3, 2, seed);
        let mut c = cfg(Mode::Ramp, &[], 40.0);
        c.consumers = ConsumerSpec::Count(5);
        c.horizon = SimTime::from_secs(2);
        c.seed = seed;
        c.inconsistency = Some(Inconsistency { severity: 1.0, seed });
        let out = run(&t, &a, &c).unwrap();
        let rep = audit(&parse_trace(out.trace.as_deref().unwrap()).unwrap());
        assert!(rep.is_clean(), "seed {seed}: {rep:?}");
    }
}

#[test]
fn invalid_scenarios_are_rejected_with_the_field() {
    let t = Topology::line(3, SimTime::from_millis(1), GBPS);
    let a = anchored(&t, 2, "/v");
    let mut c = cfg(Mode::Ramp, &[9], 1.0);
    assert!(run(&t, &a, &c).unwrap_err().to_string().contains("consumer_routers"));
    c.consumers = ConsumerSpec::Count(4);
    assert!(run(&t, &a, &c).unwrap_err().to_string().contains("consumers"));
    c.consumers = ConsumerSpec::Count(1);
    c.link_failures = vec![LinkFailure {
        at: SimTime::ZERO,
        a: RouterId(0),
        b: RouterId(2),
    }];
    assert!(run(&t, &a, &c).unwrap_err().to_string().contains("link_failure"));
    c.link_failures.clear();
    c.rate = 0.0;
    assert!(run(&t, &a, &c).unwrap_err().to_string().contains("rate"));
}
