use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use crate::error::{ParseError, TopologyError};
use crate::time::SimTime;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RouterId(pub u32);

impl fmt::Display for RouterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Additive path cost. Hop count by default.
pub type Distance = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub a: RouterId,
    pub b: RouterId,
    pub delay: SimTime,
    pub rate_bps: u64,
}

impl Link {
    pub fn other(&self, end: RouterId) -> RouterId {
        if end == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn connects(&self, x: RouterId, y: RouterId) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

/// Cost of one link for route computation.
pub fn hop_count(_link: &Link) -> Distance {
    1
}

/// Undirected router graph. Router ids need not be dense; lookups go
/// through an index that follows ascending id order.
#[derive(Clone, Debug, Default)]
pub struct Topology {
    routers: Vec<RouterId>,
    index: FxHashMap<RouterId, usize>,
    links: Vec<Link>,
    // per router index: (neighbor index, link index), ascending neighbor id
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Topology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_router(&mut self, id: RouterId) -> Result<(), TopologyError> {
        if self.index.contains_key(&id) {
            return Err(TopologyError::DuplicateRouter(id));
        }
        let pos = self.routers.partition_point(|r| *r < id);
        self.routers.insert(pos, id);
        self.adjacency.insert(pos, Vec::new());
        self.reindex();
        Ok(())
    }

    fn reindex(&mut self) {
        self.index = self.routers.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        for adj in &mut self.adjacency {
            adj.clear();
        }
        for (li, link) in self.links.iter().enumerate() {
            let ia = self.index[&link.a];
            let ib = self.index[&link.b];
            self.adjacency[ia].push((ib, li));
            self.adjacency[ib].push((ia, li));
        }
        for adj in &mut self.adjacency {
            adj.sort_unstable();
        }
    }

    pub fn add_link(&mut self, a: RouterId, b: RouterId, delay: SimTime, rate_bps: u64) -> Result<(), TopologyError> {
        if a == b {
            return Err(TopologyError::SelfLink(a));
        }
        let ia = *self.index.get(&a).ok_or(TopologyError::UnknownRouter(a))?;
        let ib = *self.index.get(&b).ok_or(TopologyError::UnknownRouter(b))?;
        if rate_bps == 0 {
            return Err(TopologyError::ZeroRate(a, b));
        }
        if self.link_between(a, b).is_some() {
            return Err(TopologyError::DuplicateLink(a, b));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let li = self.links.len();
        self.links.push(Link { a, b, delay, rate_bps });
        let pa = self.adjacency[ia].partition_point(|(n, _)| *n < ib);
        self.adjacency[ia].insert(pa, (ib, li));
        let pb = self.adjacency[ib].partition_point(|(n, _)| *n < ia);
        self.adjacency[ib].insert(pb, (ia, li));
        Ok(())
    }

    /// Copy of this topology without the link `a`-`b`.
    pub fn without_link(&self, a: RouterId, b: RouterId) -> Result<Topology, TopologyError> {
        if self.link_between(a, b).is_none() {
            return Err(TopologyError::NoSuchLink(a, b));
        }
        let mut t = self.clone();
        t.links.retain(|l| !l.connects(a, b));
        t.reindex();
        Ok(t)
    }

    pub fn routers(&self) -> &[RouterId] {
        &self.routers
    }

    pub fn router_count(&self) -> usize {
        self.routers.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn contains(&self, id: RouterId) -> bool {
        self.index.contains_key(&id)
    }

    /// Dense position of `id` in ascending id order.
    pub fn index_of(&self, id: RouterId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn router_at(&self, idx: usize) -> RouterId {
        self.routers[idx]
    }

    /// Neighbors N^i in ascending id order.
    pub fn neighbors(&self, id: RouterId) -> impl Iterator<Item = RouterId> + '_ {
        let adj = self.index.get(&id).map(|i| self.adjacency[*i].as_slice()).unwrap_or(&[]);
        adj.iter().map(|(n, _)| self.routers[*n])
    }

    /// Neighbors with the connecting link, ascending neighbor id.
    pub fn incident(&self, id: RouterId) -> impl Iterator<Item = (RouterId, &Link)> + '_ {
        let adj = self.index.get(&id).map(|i| self.adjacency[*i].as_slice()).unwrap_or(&[]);
        adj.iter().map(|(n, l)| (self.routers[*n], &self.links[*l]))
    }

    pub(crate) fn adjacency_by_index(&self, idx: usize) -> &[(usize, usize)] {
        &self.adjacency[idx]
    }

    pub fn link_between(&self, a: RouterId, b: RouterId) -> Option<&Link> {
        let ia = *self.index.get(&a)?;
        let ib = *self.index.get(&b)?;
        let adj = &self.adjacency[ia];
        adj.binary_search_by_key(&ib, |(n, _)| *n)
            .ok()
            .map(|pos| &self.links[adj[pos].1])
    }

    pub fn is_connected(&self) -> bool {
        if self.routers.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.routers.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (v, _) in &self.adjacency[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    stack.push(*v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Reads the line format: `node <id>` and
    /// `link <id> <id> <delay_ms> <rate_mbps>`, `#` starts a comment.
    pub fn parse(text: &str) -> Result<Topology, ParseError> {
        let mut t = Topology::new();
        let mut pending_links = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            let err = |message: String| ParseError::Line { line, message };
            match fields[0] {
                "node" => {
                    if fields.len() != 2 {
                        return Err(err(format!("expected `node <id>`, got {content:?}")));
                    }
                    let id = parse_id(fields[1]).map_err(err)?;
                    t.add_router(id).map_err(|e| err(e.to_string()))?;
                }
                "link" => {
                    if fields.len() != 5 {
                        return Err(err(format!(
                            "expected `link <id> <id> <delay_ms> <rate_mbps>`, got {content:?}"
                        )));
                    }
                    let a = parse_id(fields[1]).map_err(err)?;
                    let b = parse_id(fields[2]).map_err(err)?;
                    let delay_ms: f64 = fields[3]
                        .parse()
                        .ok()
                        .filter(|d: &f64| d.is_finite() && *d >= 0.0)
                        .ok_or_else(|| err(format!("bad delay {:?}", fields[3])))?;
                    let rate_mbps: f64 = fields[4]
                        .parse()
                        .ok()
                        .filter(|r: &f64| r.is_finite() && *r > 0.0)
                        .ok_or_else(|| err(format!("bad rate {:?}", fields[4])))?;
                    pending_links.push((line, a, b, delay_ms, rate_mbps));
                }
                other => return Err(err(format!("unknown record {other:?}"))),
            }
        }
        // links may reference nodes declared later in the file
        for (line, a, b, delay_ms, rate_mbps) in pending_links {
            t.add_link(
                a,
                b,
                SimTime::from_millis_f64(delay_ms),
                (rate_mbps * 1e6).round() as u64,
            )
            .map_err(|e| ParseError::Line {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(t)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.routers {
            let _ = writeln!(out, "node {r}");
        }
        for l in &self.links {
            let _ = writeln!(
                out,
                "link {} {} {} {}",
                l.a,
                l.b,
                l.delay.as_millis_f64(),
                l.rate_bps as f64 / 1e6
            );
        }
        out
    }

    pub fn line(n: u32, delay: SimTime, rate_bps: u64) -> Topology {
        let mut t = Topology::new();
        for i in 0..n {
            t.add_router(RouterId(i)).expect("fresh id");
        }
        for i in 1..n {
            t.add_link(RouterId(i - 1), RouterId(i), delay, rate_bps).expect("valid link");
        }
        t
    }

    pub fn ring(n: u32, delay: SimTime, rate_bps: u64) -> Topology {
        let mut t = Topology::line(n, delay, rate_bps);
        if n > 2 {
            t.add_link(RouterId(n - 1), RouterId(0), delay, rate_bps).expect("valid link");
        }
        t
    }

    /// Connected random graph: a uniform random spanning tree over `n`
    /// routers plus `extra_links` chords.
    pub fn random_connected(n: u32, extra_links: usize, seed: u64, delay: SimTime, rate_bps: u64) -> Topology {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Topology::new();
        for i in 0..n {
            t.add_router(RouterId(i)).expect("fresh id");
        }
        for i in 1..n {
            let parent = rng.random_range(0..i);
            t.add_link(RouterId(parent), RouterId(i), delay, rate_bps).expect("tree link");
        }
        let max_extra = (n as usize * (n as usize - 1) / 2).saturating_sub(n as usize - 1);
        let mut added = 0;
        while added < extra_links.min(max_extra) {
            let a = RouterId(rng.random_range(0..n));
            let b = RouterId(rng.random_range(0..n));
            if a != b && t.link_between(a, b).is_none() {
                t.add_link(a, b, delay, rate_bps).expect("chord");
                added += 1;
            }
        }
        t
    }

    /// ISP-like synthetic backbone: preferential-attachment tree plus chords
    /// biased toward well-connected routers. A stand-in for a measured ISP
    /// map, not a copy of one.
    pub fn synthetic_backbone(routers: u32, links: usize, seed: u64, delay: SimTime, rate_bps: u64) -> Topology {
        assert!(routers >= 2 && links + 1 >= routers as usize);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Topology::new();
        for i in 0..routers {
            t.add_router(RouterId(i)).expect("fresh id");
        }
        // endpoint multiset for degree-proportional sampling
        let mut endpoints: Vec<u32> = vec![0];
        for i in 1..routers {
            let parent = *endpoints.choose(&mut rng).expect("non-empty");
            t.add_link(RouterId(parent), RouterId(i), delay, rate_bps).expect("tree link");
            endpoints.push(parent);
            endpoints.push(i);
        }
        let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
        while t.links.len() < links {
            let a = *endpoints.choose(&mut rng).expect("non-empty");
            let b = rng.random_range(0..routers);
            let key = (a.min(b), a.max(b));
            if a == b || seen.contains(&key) || t.link_between(RouterId(a), RouterId(b)).is_some() {
                continue;
            }
            seen.insert(key);
            t.add_link(RouterId(a), RouterId(b), delay, rate_bps).expect("chord");
            endpoints.push(a);
            endpoints.push(b);
        }
        t
    }
}

fn parse_id(s: &str) -> Result<RouterId, String> {
    s.parse::<u32>().map(RouterId).map_err(|_| format!("bad router id {s:?}"))
}
