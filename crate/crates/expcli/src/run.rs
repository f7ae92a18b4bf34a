use std::fs;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use ramp_core::simcore::{run, Mode, RunMetrics, SimConfig};
use ramp_core::SimTime;

use crate::inputs::{load_anchors, load_scenario, load_topology};
use crate::report;
use crate::RunArgs;

pub struct Finished {
    pub mode: Mode,
    pub config: SimConfig,
    pub metrics: RunMetrics,
}

fn configs(args: &RunArgs, base: &SimConfig) -> Result<Vec<SimConfig>> {
    let rates = match (&args.sweep, args.rate) {
        (Some(list), _) => list.clone(),
        (None, Some(r)) => vec![r],
        (None, None) => vec![base.rate],
    };
    let mut seen = Vec::new();
    for r in &rates {
        if seen.contains(r) {
            bail!("rate {r} listed twice");
        }
        seen.push(*r);
    }
    let mut out = Vec::new();
    for &rate in &rates {
        for mode in args.mode.modes() {
            let mut c = base.clone();
            c.mode = mode;
            c.rate = rate;
            if let Some(cache) = args.cache {
                c.cache = cache;
            }
            if let Some(seed) = args.seed {
                c.seed = seed;
            }
            if let Some(h) = args.horizon {
                if !(h.is_finite() && h > 0.0) {
                    bail!("--horizon must be a positive number of seconds");
                }
                c.horizon = SimTime::from_secs_f64(h);
            }
            c.trace = args.trace;
            c.validate()?;
            out.push(c);
        }
    }
    Ok(out)
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let topology = load_topology(&args.topology)?;
    let anchors = load_anchors(&args.anchors, &topology)?;
    let base = load_scenario(args.scenario.as_deref())?;
    let configs = configs(args, &base)?;
    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;

    let results: Vec<Result<(Finished, Option<String>)>> = configs
        .into_par_iter()
        .map(|config| {
            let out = run(&topology, &anchors, &config)
                .with_context(|| format!("{} run at rate {}", config.mode, config.rate))?;
            Ok((
                Finished {
                    mode: config.mode,
                    config,
                    metrics: out.metrics,
                },
                out.trace,
            ))
        })
        .collect();

    let mut finished = Vec::with_capacity(results.len());
    for r in results {
        let (f, trace) = r?;
        if let Some(text) = trace {
            let path = args.out.join(format!("trace_{}_{}.log", f.mode, f.config.rate));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        }
        finished.push(f);
    }
    let modes = args.mode.modes();
    report::write_all(&args.out, &modes, &finished)?;
    for line in report::summary(&modes, &finished) {
        println!("{line}");
    }
    Ok(())
}
