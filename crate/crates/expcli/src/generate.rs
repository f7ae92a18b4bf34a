use anyhow::{ensure, Result};
use ramp_core::control_plane::{AnchorAssignment, Topology};
use ramp_core::simcore::SimConfig;
use ramp_core::SimTime;

use crate::inputs::{emit, load_topology};
use crate::GenerateCommand;

pub fn cmd_generate(cmd: GenerateCommand) -> Result<()> {
    match cmd {
        GenerateCommand::Topology {
            routers,
            links,
            seed,
            delay_ms,
            rate_mbps,
            out,
        } => {
            ensure!(routers >= 2, "--routers must be at least 2");
            ensure!(links + 1 >= routers as usize, "--links must be at least routers - 1");
            ensure!(links <= routers as usize * (routers as usize - 1) / 2, "--links exceeds a complete graph");
            ensure!(delay_ms.is_finite() && delay_ms >= 0.0, "--delay-ms must be non-negative");
            ensure!(rate_mbps.is_finite() && rate_mbps > 0.0, "--rate-mbps must be positive");
            let t = Topology::synthetic_backbone(
                routers,
                links,
                seed,
                SimTime::from_millis_f64(delay_ms),
                (rate_mbps * 1e6).round() as u64,
            );
            let text = format!(
                "# synthetic backbone (not a measured topology)\n\
                 # generate topology --routers {routers} --links {links} --seed {seed} --delay-ms {delay_ms} --rate-mbps {rate_mbps}\n{}",
                t.render()
            );
            emit(out.as_deref(), &text)
        }
        GenerateCommand::Anchors {
            topology,
            anchors,
            prefixes,
            seed,
            out,
        } => {
            let t = load_topology(&topology)?;
            ensure!(anchors >= 1 && anchors <= t.router_count(), "--anchors must lie in 1..={}", t.router_count());
            ensure!(prefixes >= 1, "--prefixes must be at least 1");
            let a = AnchorAssignment::random_single_homed(&t, anchors, prefixes, seed);
            let text = format!(
                "# generate anchors --anchors {anchors} --prefixes {prefixes} --seed {seed}\n{}",
                a.render()
            );
            emit(out.as_deref(), &text)
        }
        GenerateCommand::Scenario { out } => emit(out.as_deref(), &SimConfig::default().to_toml()),
    }
}
