use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ramp_core::control_plane::{AnchorAssignment, Topology};
use ramp_core::simcore::SimConfig;

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {what} file {}", path.display()))
}

pub fn load_topology(path: &Path) -> Result<Topology> {
    let text = read(path, "topology")?;
    Topology::parse(&text).with_context(|| format!("{}", path.display()))
}

pub fn load_anchors(path: &Path, topology: &Topology) -> Result<AnchorAssignment> {
    let text = read(path, "anchor")?;
    let a = AnchorAssignment::parse(&text).with_context(|| format!("{}", path.display()))?;
    a.validate(topology).with_context(|| format!("{}", path.display()))?;
    Ok(a)
}

pub fn load_scenario(path: Option<&Path>) -> Result<SimConfig> {
    match path {
        None => Ok(SimConfig::default()),
        Some(p) => {
            let text = read(p, "scenario")?;
            SimConfig::from_toml(&text).with_context(|| format!("{}", p.display()))
        }
    }
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
