use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use rayon::prelude::*;
use ramp_core::control_plane::{
    hop_count, multihoming_advantage, verify_path_equivalence, AdvantageVerdict, AnchorAssignment, Distance, MultihomingReport,
    Topology,
};
use ramp_core::simcore::{loop_fuzz, FuzzOutcome, FuzzParams};
use ramp_core::{NamePrefix, RouterId, SimTime};

use crate::inputs::{load_anchors, load_topology};
use crate::VerifyCommand;

#[derive(Args, Debug)]
pub struct MultihomingArgs {
    /// Custom scenario topology; without it the built-in cases run.
    #[arg(long, requires_all = ["anchors", "prefix", "origin", "relay", "bound"])]
    pub topology: Option<PathBuf>,
    #[arg(long)]
    pub anchors: Option<PathBuf>,
    #[arg(long)]
    pub prefix: Option<String>,
    /// Failed link as `A-B`.
    #[arg(long)]
    pub fail: Option<String>,
    #[arg(long)]
    pub origin: Option<u32>,
    #[arg(long)]
    pub relay: Option<u32>,
    /// Anchor the origin bound the prefix to.
    #[arg(long)]
    pub bound: Option<u32>,
}

pub fn cmd_verify(cmd: VerifyCommand) -> Result<()> {
    match cmd {
        VerifyCommand::Paths { topology, anchors } => paths(&topology, &anchors),
        VerifyCommand::Loops {
            runs,
            severity,
            routers,
            horizon,
            seed,
        } => loops(runs, &severity, routers, horizon, seed),
        VerifyCommand::Multihoming(args) => multihoming(&args),
    }
}

fn paths(topology: &std::path::Path, anchors: &std::path::Path) -> Result<()> {
    let t = load_topology(topology)?;
    let a = load_anchors(anchors, &t)?;
    let rep = verify_path_equivalence(&t, &a, hop_count, t.routers());
    println!(
        "paths: {} pairs compared, {} single-anchor, {} multi-homed, {} unreachable",
        rep.compared, rep.single_anchor_pairs, rep.multi_homed_pairs, rep.unreachable
    );
    println!("paths: {} divergences, {} multi-homed length mismatches", rep.divergences.len(), rep.length_mismatches.len());
    if let Some(d) = rep.divergences.first().or(rep.length_mismatches.first()) {
        println!(
            "paths: first mismatch origin {} prefix {}: fib {:?} fab {:?}",
            d.origin, d.prefix, d.prefix_route, d.anchor_route
        );
    }
    ensure!(rep.is_clean(), "prefix and anchor routes disagree");
    Ok(())
}

fn loops(runs: u64, severities: &[f64], routers: u32, horizon: f64, seed: u64) -> Result<()> {
    ensure!(runs >= 1, "--runs must be at least 1");
    ensure!(routers >= 2, "--routers must be at least 2");
    ensure!(horizon.is_finite() && horizon > 0.0, "--horizon must be positive");
    for s in severities {
        ensure!((0.0..=1.0).contains(s), "severity {s} outside [0, 1]");
    }
    let params = FuzzParams {
        routers,
        horizon: SimTime::from_secs_f64(horizon),
    };
    let jobs: Vec<(f64, u64)> = severities
        .iter()
        .flat_map(|&s| (0..runs).map(move |i| (s, seed + i)))
        .collect();
    let outcomes: Vec<FuzzOutcome> = jobs
        .into_par_iter()
        .map(|(s, k)| loop_fuzz(k, s, params).with_context(|| format!("fuzz seed {k} severity {s}")))
        .collect::<Result<_>>()?;

    let mut failed = false;
    for &s in severities {
        let mine: Vec<&FuzzOutcome> = outcomes.iter().filter(|o| o.severity == s).collect();
        let sum = |f: &dyn Fn(&FuzzOutcome) -> usize| mine.iter().map(|o| f(o)).sum::<usize>();
        let traversals = sum(&|o| o.traversals());
        let other = sum(&|o| {
            let r = &o.report;
            r.discontinuities + r.reverse_path_violations + r.conservation_violations + r.anonymity_violations
        });
        let loop_errors = sum(&|o| o.report.loop_errors);
        println!(
            "loops: severity {s}: {} runs, {} interests, {} delivered, {} loop traversals, {} loop-coded errors, {} other violations",
            mine.len(),
            sum(&|o| o.report.instances),
            sum(&|o| o.report.delivered),
            traversals,
            loop_errors,
            other
        );
        if let Some(bad) = mine.iter().find(|o| !o.report.is_clean()) {
            println!(
                "loops: first violation at seed {}: {}",
                bad.seed,
                bad.report.first_problem.as_deref().unwrap_or("?")
            );
        }
        failed |= traversals > 0 || other > 0 || (s == 0.0 && loop_errors > 0);
    }
    ensure!(!failed, "loop-freedom violations found");
    Ok(())
}

fn prefix(s: &str) -> Result<NamePrefix> {
    NamePrefix::parse(s).with_context(|| format!("bad prefix {s:?}"))
}

fn show(name: &str, rep: &MultihomingReport) -> String {
    let d = |x: Option<Distance>| x.map_or("inf".to_string(), |v| v.to_string());
    format!(
        "multihoming: {name}: {:?} (relay->bound {}, alternate {}, relay->alternate {}, relay->origin {}, origin->alternate {})",
        rep.verdict,
        d(rep.relay_to_bound),
        rep.alternate.map_or("-".to_string(), |a| a.to_string()),
        d(rep.relay_to_alternate),
        d(rep.relay_to_origin),
        d(rep.origin_to_alternate)
    )
}

/// Origin 0, relay 1, bound anchor 3 reached through 2, alternate anchor
/// 6 reached from the relay through 7. Link 1-2 fails; `detour` lists the
/// routers of an extra relay-to-bound path.
fn scripted(detour: &[u32]) -> (Topology, AnchorAssignment) {
    let mut t = Topology::new();
    let mut ids: Vec<u32> = (0..8).chain(detour.iter().copied()).collect();
    ids.sort_unstable();
    ids.dedup();
    for i in ids {
        t.add_router(RouterId(i)).expect("fresh id");
    }
    let mut link = |x: u32, y: u32| {
        t.add_link(RouterId(x), RouterId(y), SimTime::from_millis(1), 1_000_000_000)
            .expect("valid link")
    };
    for (x, y) in [(0, 1), (1, 2), (2, 3), (1, 7), (7, 6), (0, 5), (5, 4), (4, 6)] {
        link(x, y);
    }
    if !detour.is_empty() {
        let mut prev = 1;
        for &d in detour {
            link(prev, d);
            prev = d;
        }
        link(prev, 3);
    }
    let mut a = AnchorAssignment::new();
    let p = NamePrefix::parse("/P").expect("well-formed");
    a.announce(RouterId(3), p.clone()).expect("fresh");
    a.announce(RouterId(6), p).expect("fresh");
    (t, a)
}

fn multihoming(args: &MultihomingArgs) -> Result<()> {
    if let Some(path) = &args.topology {
        let t = load_topology(path)?;
        let a = load_anchors(args.anchors.as_ref().expect("required by clap"), &t)?;
        let p = prefix(args.prefix.as_deref().expect("required by clap"))?;
        let fail = match &args.fail {
            None => None,
            Some(s) => {
                let Some((x, y)) = s.split_once('-') else {
                    bail!("--fail expects A-B, got {s:?}");
                };
                let id = |v: &str| v.trim().parse::<u32>().map(RouterId).with_context(|| format!("bad router id {v:?}"));
                Some((id(x)?, id(y)?))
            }
        };
        let r = |v: Option<u32>| RouterId(v.expect("required by clap"));
        let rep = multihoming_advantage(&t, &a, hop_count, &p, fail, r(args.origin), r(args.relay), r(args.bound))?;
        println!("{}", show("custom", &rep));
        return Ok(());
    }
    let p = prefix("/P")?;
    let cases: [(&str, Vec<u32>, AdvantageVerdict); 3] = [
        ("equal-cost detour", vec![8], AdvantageVerdict::NoAdvantage),
        ("long detour, closer alternate", vec![8, 9, 10], AdvantageVerdict::CloserAlternateAnchor),
        ("bound anchor cut off", vec![], AdvantageVerdict::AvoidsReturnToOrigin),
    ];
    let mut wrong = 0;
    for (name, detour, expected) in cases {
        let (t, a) = scripted(&detour);
        let rep = multihoming_advantage(
            &t,
            &a,
            hop_count,
            &p,
            Some((RouterId(1), RouterId(2))),
            RouterId(0),
            RouterId(1),
            RouterId(3),
        )?;
        let ok = rep.verdict == expected;
        wrong += usize::from(!ok);
        println!("{}{}", show(name, &rep), if ok { "" } else { " UNEXPECTED" });
    }
    ensure!(wrong == 0, "{wrong} multi-homing cases gave an unexpected verdict");
    Ok(())
}
