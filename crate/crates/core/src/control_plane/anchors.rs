use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{RouterId, Topology};
use crate::error::{AnchorError, ParseError};
use crate::names::NamePrefix;

/// Which routers announce which name prefixes as locally hosted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnchorAssignment {
    bindings: BTreeMap<RouterId, Vec<NamePrefix>>,
}

impl AnchorAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn announce(&mut self, anchor: RouterId, prefix: NamePrefix) -> Result<(), AnchorError> {
        let list = self.bindings.entry(anchor).or_default();
        if list.contains(&prefix) {
            return Err(AnchorError::DuplicateAnnouncement {
                anchor,
                prefix: prefix.to_string(),
            });
        }
        list.push(prefix);
        Ok(())
    }

    pub fn anchors(&self) -> impl Iterator<Item = RouterId> + '_ {
        self.bindings.keys().copied()
    }

    pub fn prefixes_of(&self, anchor: RouterId) -> &[NamePrefix] {
        self.bindings.get(&anchor).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn bindings(&self) -> impl Iterator<Item = (RouterId, &[NamePrefix])> {
        self.bindings.iter().map(|(a, p)| (*a, p.as_slice()))
    }

    /// Prefix to the sorted set of anchors announcing it.
    pub fn anchors_by_prefix(&self) -> BTreeMap<NamePrefix, Vec<RouterId>> {
        let mut out: BTreeMap<NamePrefix, Vec<RouterId>> = BTreeMap::new();
        for (anchor, prefixes) in &self.bindings {
            for p in prefixes {
                out.entry(p.clone()).or_default().push(*anchor);
            }
        }
        out
    }

    pub fn prefix_count(&self) -> usize {
        self.anchors_by_prefix().len()
    }

    pub fn validate(&self, topology: &Topology) -> Result<(), AnchorError> {
        for anchor in self.bindings.keys() {
            if !topology.contains(*anchor) {
                return Err(AnchorError::UnknownAnchor(*anchor));
            }
        }
        Ok(())
    }

    /// Reads `anchor <router_id> <prefix> [<prefix>...]` lines; `#` comments.
    /// Repeated lines for one anchor accumulate.
    pub fn parse(text: &str) -> Result<AnchorAssignment, ParseError> {
        let mut out = AnchorAssignment::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_whitespace();
            if fields.next() != Some("anchor") {
                return Err(ParseError::Line {
                    line,
                    message: format!("expected `anchor <id> <prefix>...`, got {content:?}"),
                });
            }
            let id = fields
                .next()
                .and_then(|s| s.parse::<u32>().ok())
                .map(RouterId)
                .ok_or_else(|| ParseError::Line {
                    line,
                    message: "missing or bad router id".into(),
                })?;
            let mut any = false;
            for p in fields {
                let prefix = NamePrefix::parse(p).map_err(|source| ParseError::Name { line, source })?;
                out.announce(id, prefix).map_err(|e| ParseError::Line {
                    line,
                    message: e.to_string(),
                })?;
                any = true;
            }
            if !any {
                return Err(ParseError::Line {
                    line,
                    message: format!("anchor {id} lists no prefixes"),
                });
            }
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (anchor, prefixes) in &self.bindings {
            let _ = write!(out, "anchor {anchor}");
            for p in prefixes {
                let _ = write!(out, " {p}");
            }
            out.push('\n');
        }
        out
    }

    /// `anchors` distinct routers drawn at random, each announcing
    /// `prefixes_per_anchor` single-homed prefixes `/ramp/p<k>`.
    pub fn random_single_homed(topology: &Topology, anchors: usize, prefixes_per_anchor: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut routers = topology.routers().to_vec();
        routers.shuffle(&mut rng);
        routers.truncate(anchors);
        routers.sort_unstable();
        let mut out = AnchorAssignment::new();
        let mut k = 0usize;
        for a in routers {
            for _ in 0..prefixes_per_anchor {
                let prefix = NamePrefix::parse(&format!("/ramp/p{k}")).expect("well-formed");
                out.announce(a, prefix).expect("fresh prefix");
                k += 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::SimTime;

    #[test]
    fn parse_accumulates_and_rejects_duplicates() {
        let a = AnchorAssignment::parse("anchor 1 /a /b\n# c\nanchor 2 /a\nanchor 1 /c").unwrap();
        assert_eq!(a.prefixes_of(RouterId(1)).len(), 3);
        let by = a.anchors_by_prefix();
        assert_eq!(by[&NamePrefix::parse("/a").unwrap()], vec![RouterId(1), RouterId(2)]);
        assert!(AnchorAssignment::parse("anchor 1 /a /a").is_err());
        assert!(AnchorAssignment::parse("anchor 1").is_err());
        assert!(AnchorAssignment::parse("anchor x /a").is_err());
        assert!(matches!(
            AnchorAssignment::parse("anchor 1 //a"),
            Err(ParseError::Name { line: 1, .. })
        ));
        assert_eq!(AnchorAssignment::parse(&a.render()).unwrap(), a);
    }

    #[test]
    fn random_assignment_shape() {
        let t = Topology::synthetic_backbone(153, 184, 1, SimTime::ZERO, 1);
        let a = AnchorAssignment::random_single_homed(&t, 20, 500, 9);
        assert_eq!(a.anchors().count(), 20);
        assert_eq!(a.prefix_count(), 10_000);
        assert!(a.validate(&t).is_ok());
    }
}
