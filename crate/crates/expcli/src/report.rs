//! CSV files and summary lines. Each CSV has one header row; columns are
//! prefixed by mode so RAMP and NDN values of one rate sit side by side.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ramp_core::simcore::{Mode, RunMetrics, TableKind};
use ramp_core::RouterId;

use crate::run::Finished;

pub const FILES: [&str; 5] = [
    "table_sizes.csv",
    "lookups.csv",
    "delays.csv",
    "interests_per_router.csv",
    "run_info.csv",
];

fn tables_of(mode: Mode) -> &'static [(&'static str, TableKind)] {
    match mode {
        Mode::Ramp => &[
            ("prt", TableKind::Prt),
            ("fab", TableKind::Fab),
            ("lsat", TableKind::Lsat),
            ("cs", TableKind::Cs),
        ],
        Mode::Ndn => &[("fib", TableKind::Fib), ("pit", TableKind::Pit), ("cs", TableKind::Cs)],
    }
}

/// Per-retrieval lookup columns and their index in `lookups_per_retrieval`.
fn lookups_of(mode: Mode) -> &'static [(&'static str, usize)] {
    match mode {
        Mode::Ramp => &[("prt", 0), ("fab", 1), ("lsat", 2)],
        Mode::Ndn => &[("fib", 3), ("pit", 4)],
    }
}

fn rates(finished: &[Finished]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for f in finished {
        if !out.contains(&f.config.rate) {
            out.push(f.config.rate);
        }
    }
    out
}

fn find(finished: &[Finished], mode: Mode, rate: f64) -> &RunMetrics {
    &finished
        .iter()
        .find(|f| f.mode == mode && f.config.rate == rate)
        .expect("one run per (mode, rate)")
        .metrics
}

/// Nearest-rank quantile of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    v[rank - 1]
}

fn header(modes: &[Mode], lead: &[&str], cols: impl Fn(Mode) -> Vec<String>) -> String {
    let mut h: Vec<String> = lead.iter().map(|s| s.to_string()).collect();
    for &m in modes {
        h.extend(cols(m).into_iter().map(|c| format!("{m}_{c}")));
    }
    h.join(",") + "\n"
}

pub fn table_sizes(modes: &[Mode], finished: &[Finished]) -> String {
    let mut s = header(modes, &["rate"], |m| tables_of(m).iter().map(|(n, _)| n.to_string()).collect());
    for rate in rates(finished) {
        let _ = write!(s, "{rate}");
        for &m in modes {
            let r = find(finished, m, rate);
            for (_, kind) in tables_of(m) {
                let _ = write!(s, ",{:.4}", r.mean_table(*kind));
            }
        }
        s.push('\n');
    }
    s
}

pub fn lookups(modes: &[Mode], finished: &[Finished]) -> String {
    let mut s = header(modes, &["rate"], |m| {
        let mut c = vec!["retrievals".to_string()];
        c.extend(lookups_of(m).iter().map(|(n, _)| n.to_string()));
        c.push("path_hops".into());
        c
    });
    for rate in rates(finished) {
        let _ = write!(s, "{rate}");
        for &m in modes {
            let r = find(finished, m, rate);
            let per = r.lookups_per_retrieval();
            let _ = write!(s, ",{}", r.retrievals);
            for (_, i) in lookups_of(m) {
                let _ = write!(s, ",{:.4}", per[*i]);
            }
            let _ = write!(s, ",{:.4}", r.mean_path_hops());
        }
        s.push('\n');
    }
    s
}

pub fn delays(modes: &[Mode], finished: &[Finished]) -> String {
    let cols = ["completed", "mean_ms", "p50_ms", "p95_ms", "max_ms"];
    let mut s = header(modes, &["rate"], |_| cols.iter().map(|c| c.to_string()).collect());
    for rate in rates(finished) {
        let _ = write!(s, "{rate}");
        for &m in modes {
            let r = find(finished, m, rate);
            let d = &r.delays_ms;
            let max = d.iter().copied().fold(0.0, f64::max);
            let _ = write!(
                s,
                ",{},{:.4},{:.4},{:.4},{:.4}",
                d.len(),
                r.mean_delay_ms(),
                quantile(d, 0.5),
                quantile(d, 0.95),
                max
            );
        }
        s.push('\n');
    }
    s
}

pub fn interests_per_router(modes: &[Mode], finished: &[Finished]) -> String {
    let mut s = header(modes, &["rate", "router"], |_| vec!["interests".into()]);
    for rate in rates(finished) {
        let routers: BTreeSet<RouterId> = modes
            .iter()
            .flat_map(|&m| {
                let r = find(finished, m, rate);
                r.tables.keys().chain(r.interests_sent.keys()).copied()
            })
            .collect();
        for router in routers {
            let _ = write!(s, "{rate},{router}");
            for &m in modes {
                let r = find(finished, m, rate);
                let _ = write!(s, ",{}", r.interests_sent.get(&router).copied().unwrap_or(0));
            }
            s.push('\n');
        }
    }
    s
}

pub fn run_info(finished: &[Finished]) -> String {
    let mut s = String::from(
        "mode,rate,seed,horizon_s,warmup_s,sample_interval_ms,rto_ms,max_retransmissions,cache,zipf_alpha,\
         cos_per_prefix,routers,consumers,requests,completed,failed,retransmissions,timeouts,samples,events\n",
    );
    for f in finished {
        let c = &f.config;
        let m = &f.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            f.mode,
            c.rate,
            c.seed,
            c.horizon.as_secs_f64(),
            m.warmup.as_secs_f64(),
            c.sample_interval.as_millis_f64(),
            c.rto.as_millis_f64(),
            c.max_retransmissions,
            c.cache,
            c.zipf_alpha,
            c.cos_per_prefix,
            m.routers,
            m.consumers,
            m.requests,
            m.completed,
            m.failed,
            m.retransmissions,
            m.timeouts,
            m.samples,
            m.events
        );
    }
    s
}

pub fn write_all(dir: &Path, modes: &[Mode], finished: &[Finished]) -> Result<()> {
    let bodies = [
        table_sizes(modes, finished),
        lookups(modes, finished),
        delays(modes, finished),
        interests_per_router(modes, finished),
        run_info(finished),
    ];
    for (name, body) in FILES.iter().zip(bodies) {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn gap(modes: &[Mode], ramp: f64, ndn: f64) -> String {
    if modes.len() == 2 && ndn != 0.0 {
        format!(" ({:+.1}%)", 100.0 * (ramp - ndn) / ndn)
    } else {
        String::new()
    }
}

/// One line per metric family and rate.
pub fn summary(modes: &[Mode], finished: &[Finished]) -> Vec<String> {
    let mut lines = Vec::new();
    for rate in rates(finished) {
        let per_mode = |f: &dyn Fn(Mode, &RunMetrics) -> String| {
            modes
                .iter()
                .map(|&m| format!("{m} {}", f(m, find(finished, m, rate))))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        let value = |m: Mode, g: fn(&RunMetrics) -> f64| {
            if modes.contains(&m) {
                g(find(finished, m, rate))
            } else {
                0.0
            }
        };
        lines.push(format!(
            "rate {rate}: table sizes: {}",
            per_mode(&|m, r| tables_of(m)
                .iter()
                .map(|(n, k)| format!("{n} {:.1}", r.mean_table(*k)))
                .collect::<Vec<_>>()
                .join(" "))
        ));
        lines.push(format!(
            "rate {rate}: lookups per retrieval: {}",
            per_mode(&|m, r| {
                let per = r.lookups_per_retrieval();
                let mut parts: Vec<String> = lookups_of(m).iter().map(|(n, i)| format!("{n} {:.3}", per[*i])).collect();
                parts.push(format!("hops {:.3}", r.mean_path_hops()));
                parts.join(" ")
            })
        ));
        let ipr = |r: &RunMetrics| r.mean_interests_per_router();
        lines.push(format!(
            "rate {rate}: interests per router: {}{}",
            per_mode(&|_, r| format!("{:.1}", r.mean_interests_per_router())),
            gap(modes, value(Mode::Ramp, ipr), value(Mode::Ndn, ipr))
        ));
        let delay = |r: &RunMetrics| r.mean_delay_ms();
        lines.push(format!(
            "rate {rate}: mean delay: {}{}",
            per_mode(&|_, r| format!("{:.3} ms", r.mean_delay_ms())),
            gap(modes, value(Mode::Ramp, delay), value(Mode::Ndn, delay))
        ));
    }
    lines
}
