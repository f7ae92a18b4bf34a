//! Centralized route computation standing in for the name-based routing
//! protocol: per-router FAB (anchor -> ranked next hops), PRT (prefix ->
//! ranked anchors) and, for the baseline plane, per-prefix FIBs.
//!
//! Ranking everywhere is by (distance, router id), so FIB and FAB rank-1
//! choices coincide exactly for single-anchor prefixes.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{AnchorAssignment, Distance, Link, RouterId, Topology};
use crate::names::{Name, NamePrefix, PrefixTrie};

pub type PrefixId = usize;
pub type AnchorSetId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NextHop {
    pub via: RouterId,
    pub distance: Distance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnchorRank {
    pub anchor: RouterId,
    pub distance: Distance,
}

/// All known prefixes, shared by every router's PRT and FIB. Prefixes
/// announced by the same anchor set share one ranking slot.
#[derive(Debug)]
pub struct PrefixIndex {
    trie: PrefixTrie<PrefixId>,
    prefixes: Vec<NamePrefix>,
    set_of: Vec<AnchorSetId>,
    anchor_sets: Vec<Vec<RouterId>>,
}

impl PrefixIndex {
    pub fn build(assignment: &AnchorAssignment) -> Self {
        let by_prefix = assignment.anchors_by_prefix();
        let mut set_ids: BTreeMap<Vec<RouterId>, AnchorSetId> = BTreeMap::new();
        let mut anchor_sets = Vec::new();
        let mut trie = PrefixTrie::new();
        let mut prefixes = Vec::with_capacity(by_prefix.len());
        let mut set_of = Vec::with_capacity(by_prefix.len());
        for (prefix, anchors) in by_prefix {
            let next = anchor_sets.len();
            let sid = *set_ids.entry(anchors.clone()).or_insert_with(|| {
                anchor_sets.push(anchors);
                next
            });
            trie.insert(prefix.clone(), prefixes.len());
            prefixes.push(prefix);
            set_of.push(sid);
        }
        Self {
            trie,
            prefixes,
            set_of,
            anchor_sets,
        }
    }

    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    pub fn prefixes(&self) -> &[NamePrefix] {
        &self.prefixes
    }

    pub fn prefix(&self, id: PrefixId) -> &NamePrefix {
        &self.prefixes[id]
    }

    pub fn id_of(&self, prefix: &NamePrefix) -> Option<PrefixId> {
        self.trie.get(prefix).copied()
    }

    /// Longest-prefix match of `name` over the known prefixes.
    pub fn lookup(&self, name: &Name) -> Option<PrefixId> {
        self.trie.longest_match(name).map(|(_, id)| *id)
    }

    pub fn anchors(&self, id: PrefixId) -> &[RouterId] {
        &self.anchor_sets[self.set_of[id]]
    }

    pub fn anchor_set(&self, id: PrefixId) -> AnchorSetId {
        self.set_of[id]
    }

    pub fn anchor_set_count(&self) -> usize {
        self.anchor_sets.len()
    }

    pub fn anchor_set_members(&self, set: AnchorSetId) -> &[RouterId] {
        &self.anchor_sets[set]
    }
}

/// Forwarding to Anchors Base of one router. Unreachable anchors and the
/// router itself have no entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Fab {
    entries: BTreeMap<RouterId, Vec<NextHop>>,
}

impl Fab {
    /// Ranked next hops toward `anchor`, best first; empty if unknown.
    pub fn get(&self, anchor: RouterId) -> &[NextHop] {
        self.entries.get(&anchor).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (RouterId, &[NextHop])> {
        self.entries.iter().map(|(a, h)| (*a, h.as_slice()))
    }

    pub fn set(&mut self, anchor: RouterId, hops: Vec<NextHop>) {
        if hops.is_empty() {
            self.entries.remove(&anchor);
        } else {
            self.entries.insert(anchor, hops);
        }
    }

    /// D(i, a, q): stored distance to `anchor` via neighbor `via`.
    pub fn distance_via(&self, anchor: RouterId, via: RouterId) -> Option<Distance> {
        self.get(anchor).iter().find(|h| h.via == via).map(|h| h.distance)
    }
}

/// Prefix Resolution Table of one router: every known prefix mapped to its
/// anchors ranked nearest first.
#[derive(Clone, Debug)]
pub struct Prt {
    index: Arc<PrefixIndex>,
    ranked_sets: Arc<Vec<Vec<AnchorRank>>>,
}

impl Prt {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index(&self) -> &Arc<PrefixIndex> {
        &self.index
    }

    /// Longest-prefix match of `name`, with the matched prefix's ranked anchors.
    pub fn resolve(&self, name: &Name) -> Option<(&NamePrefix, &[AnchorRank])> {
        let id = self.index.lookup(name)?;
        Some((self.index.prefix(id), self.ranked(id)))
    }

    pub fn get(&self, prefix: &NamePrefix) -> Option<&[AnchorRank]> {
        self.index.id_of(prefix).map(|id| self.ranked(id))
    }

    pub fn ranked(&self, id: PrefixId) -> &[AnchorRank] {
        &self.ranked_sets[self.index.anchor_set(id)]
    }
}

#[derive(Clone, Debug)]
pub struct RouterRoutes {
    pub fab: Fab,
    pub prt: Prt,
}

/// Route state for every router, plus the link costs and true anchor
/// distances the tables were derived from.
#[derive(Clone, Debug)]
pub struct RouteTables {
    pub(crate) index: Arc<PrefixIndex>,
    pub(crate) routers: BTreeMap<RouterId, RouterRoutes>,
    pub(crate) neighbor_costs: BTreeMap<RouterId, Vec<(RouterId, Distance)>>,
    pub(crate) anchor_distances: BTreeMap<RouterId, FxHashMap<RouterId, Distance>>,
}

impl RouteTables {
    pub fn index(&self) -> &Arc<PrefixIndex> {
        &self.index
    }

    pub fn router(&self, id: RouterId) -> Option<&RouterRoutes> {
        self.routers.get(&id)
    }

    pub fn routers(&self) -> impl Iterator<Item = (RouterId, &RouterRoutes)> {
        self.routers.iter().map(|(id, r)| (*id, r))
    }

    /// Shortest-path distance from `router` to `anchor` in the topology the
    /// tables were computed from (not affected by later perturbation).
    pub fn true_distance(&self, router: RouterId, anchor: RouterId) -> Option<Distance> {
        self.anchor_distances.get(&anchor)?.get(&router).copied()
    }

    pub fn neighbor_costs(&self, router: RouterId) -> &[(RouterId, Distance)] {
        self.neighbor_costs.get(&router).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Router sequence obtained by following rank-1 FAB hops from `origin`
    /// to `anchor`. `None` when a hop is missing or a router repeats.
    pub fn fab_walk(&self, origin: RouterId, anchor: RouterId) -> Option<Vec<RouterId>> {
        let mut path = vec![origin];
        let mut cur = origin;
        while cur != anchor {
            let next = self.routers.get(&cur)?.fab.get(anchor).first()?.via;
            if path.contains(&next) {
                return None;
            }
            path.push(next);
            cur = next;
        }
        Some(path)
    }
}

/// Baseline FIB of one router: every known prefix mapped to ranked next
/// hops toward its nearest anchor. Routers anchoring a prefix hold an
/// entry with no next hops.
#[derive(Clone, Debug)]
pub struct NdnFib {
    index: Arc<PrefixIndex>,
    by_set: Arc<Vec<Vec<NextHop>>>,
}

impl NdnFib {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index(&self) -> &Arc<PrefixIndex> {
        &self.index
    }

    pub fn lookup(&self, name: &Name) -> Option<(PrefixId, &[NextHop])> {
        let id = self.index.lookup(name)?;
        Some((id, self.next_hops(id)))
    }

    pub fn get(&self, prefix: &NamePrefix) -> Option<&[NextHop]> {
        self.index.id_of(prefix).map(|id| self.next_hops(id))
    }

    pub fn next_hops(&self, id: PrefixId) -> &[NextHop] {
        &self.by_set[self.index.anchor_set(id)]
    }
}

pub type NdnFibs = BTreeMap<RouterId, NdnFib>;

fn link_cost<F: Fn(&Link) -> Distance>(cost: &F, link: &Link) -> Distance {
    let c = cost(link);
    assert!(c > 0, "link costs must be positive");
    c
}

/// Multi-source Dijkstra over router indices; `None` = unreachable.
fn distances_from<F: Fn(&Link) -> Distance>(t: &Topology, sources: &[RouterId], cost: &F) -> Vec<Option<Distance>> {
    let mut dist: Vec<Option<Distance>> = vec![None; t.router_count()];
    let mut heap = BinaryHeap::new();
    for s in sources {
        if let Some(i) = t.index_of(*s) {
            dist[i] = Some(0);
            heap.push(Reverse((0, i)));
        }
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        if dist[u].is_some_and(|best| d > best) {
            continue;
        }
        for (v, li) in t.adjacency_by_index(u) {
            let nd = d + link_cost(cost, &t.links()[*li]);
            if dist[*v].is_none_or(|best| nd < best) {
                dist[*v] = Some(nd);
                heap.push(Reverse((nd, *v)));
            }
        }
    }
    dist
}

/// Next hops at router index `i` that are strictly closer to the target
/// than `i`, ranked by (cost + neighbor distance, neighbor id).
fn ranked_next_hops<F: Fn(&Link) -> Distance>(
    t: &Topology,
    i: usize,
    dist: &[Option<Distance>],
    cost: &F,
) -> Vec<NextHop> {
    let Some(di) = dist[i] else {
        return Vec::new();
    };
    let mut hops: Vec<NextHop> = t
        .adjacency_by_index(i)
        .iter()
        .filter_map(|(v, li)| {
            let dv = dist[*v]?;
            (dv < di).then(|| NextHop {
                via: t.router_at(*v),
                distance: link_cost(cost, &t.links()[*li]) + dv,
            })
        })
        .collect();
    hops.sort_by_key(|h| (h.distance, h.via));
    hops
}

/// Builds every router's FAB and PRT from the topology and anchor bindings.
pub fn compute_routes<F: Fn(&Link) -> Distance>(t: &Topology, a: &AnchorAssignment, cost: F) -> RouteTables {
    let index = Arc::new(PrefixIndex::build(a));
    let anchors: Vec<RouterId> = a.anchors().filter(|r| t.contains(*r)).collect();
    let per_anchor: BTreeMap<RouterId, Vec<Option<Distance>>> =
        anchors.iter().map(|a| (*a, distances_from(t, &[*a], &cost))).collect();

    let mut routers = BTreeMap::new();
    for (i, &rid) in t.routers().iter().enumerate() {
        let mut fab = Fab::default();
        for (&anchor, dist) in &per_anchor {
            if anchor != rid {
                fab.set(anchor, ranked_next_hops(t, i, dist, &cost));
            }
        }
        let ranked_sets: Vec<Vec<AnchorRank>> = (0..index.anchor_set_count())
            .map(|set| {
                let mut ranks: Vec<AnchorRank> = index
                    .anchor_set_members(set)
                    .iter()
                    .filter_map(|anchor| {
                        let d = per_anchor.get(anchor)?[i]?;
                        Some(AnchorRank {
                            anchor: *anchor,
                            distance: d,
                        })
                    })
                    .collect();
                ranks.sort_by_key(|r| (r.distance, r.anchor));
                ranks
            })
            .collect();
        let prt = Prt {
            index: index.clone(),
            ranked_sets: Arc::new(ranked_sets),
        };
        routers.insert(rid, RouterRoutes { fab, prt });
    }

    let neighbor_costs = t
        .routers()
        .iter()
        .map(|r| {
            let costs = t.incident(*r).map(|(n, l)| (n, link_cost(&cost, l))).collect();
            (*r, costs)
        })
        .collect();
    let anchor_distances = per_anchor
        .iter()
        .map(|(a, dist)| {
            let m = dist
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (t.router_at(i), d)))
                .collect();
            (*a, m)
        })
        .collect();

    RouteTables {
        index,
        routers,
        neighbor_costs,
        anchor_distances,
    }
}

/// Builds the baseline per-prefix FIBs; the distance to a prefix is the
/// minimum over its anchors.
pub fn build_ndn_fibs<F: Fn(&Link) -> Distance>(t: &Topology, a: &AnchorAssignment, cost: F) -> NdnFibs {
    let index = Arc::new(PrefixIndex::build(a));
    let per_set: Vec<Vec<Option<Distance>>> = (0..index.anchor_set_count())
        .map(|s| distances_from(t, index.anchor_set_members(s), &cost))
        .collect();
    t.routers()
        .iter()
        .enumerate()
        .map(|(i, rid)| {
            let by_set = per_set.iter().map(|dist| ranked_next_hops(t, i, dist, &cost)).collect();
            (
                *rid,
                NdnFib {
                    index: index.clone(),
                    by_set: Arc::new(by_set),
                },
            )
        })
        .collect()
}

/// Router sequence from following rank-1 FIB hops from `origin` until a
/// router anchoring `prefix` is reached.
pub fn fib_walk(fibs: &NdnFibs, origin: RouterId, prefix: &NamePrefix) -> Option<Vec<RouterId>> {
    let fib = fibs.get(&origin)?;
    let id = fib.index().id_of(prefix)?;
    let anchors = fib.index().anchors(id);
    let mut path = vec![origin];
    let mut cur = origin;
    while !anchors.contains(&cur) {
        let next = fibs.get(&cur)?.next_hops(id).first()?.via;
        if path.contains(&next) {
            return None;
        }
        path.push(next);
        cur = next;
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control_plane::hop_count;
    use crate::time::SimTime;

    fn r(i: u32) -> RouterId {
        RouterId(i)
    }

    fn p(s: &str) -> NamePrefix {
        s.parse().unwrap()
    }

    fn line_xyz() -> (Topology, AnchorAssignment) {
        let t = Topology::line(3, SimTime::ZERO, 1);
        let mut a = AnchorAssignment::new();
        a.announce(r(2), p("/P")).unwrap();
        (t, a)
    }

    #[test]
    fn line_topology_fab_and_prt() {
        let (t, a) = line_xyz();
        let rt = compute_routes(&t, &a, hop_count);
        let x = rt.router(r(0)).unwrap();
        assert_eq!(x.fab.get(r(2)), [NextHop { via: r(1), distance: 2 }]);
        assert_eq!(x.prt.get(&p("/P")).unwrap(), [AnchorRank { anchor: r(2), distance: 2 }]);
        let z = rt.router(r(2)).unwrap();
        assert!(z.fab.is_empty());
        assert_eq!(z.prt.get(&p("/P")).unwrap(), [AnchorRank { anchor: r(2), distance: 0 }]);
    }

    #[test]
    fn only_strictly_closer_neighbors_are_next_hops() {
        // square 0-1-2-3-0, anchor 2: router 0 has two equal-cost hops
        let t = Topology::ring(4, SimTime::ZERO, 1);
        let mut a = AnchorAssignment::new();
        a.announce(r(2), p("/P")).unwrap();
        let rt = compute_routes(&t, &a, hop_count);
        assert_eq!(
            rt.router(r(0)).unwrap().fab.get(r(2)),
            [NextHop { via: r(1), distance: 2 }, NextHop { via: r(3), distance: 2 }]
        );
        assert_eq!(rt.router(r(1)).unwrap().fab.get(r(2)), [NextHop { via: r(2), distance: 1 }]);
        assert_eq!(rt.fab_walk(r(0), r(2)).unwrap(), [r(0), r(1), r(2)]);
    }

    #[test]
    fn multihomed_fib_uses_nearest_anchor() {
        // 0-1-2-3-4, /P at 1 and 4
        let t = Topology::line(5, SimTime::ZERO, 1);
        let mut a = AnchorAssignment::new();
        a.announce(r(1), p("/P")).unwrap();
        a.announce(r(4), p("/P")).unwrap();
        let fibs = build_ndn_fibs(&t, &a, hop_count);
        assert_eq!(fibs[&r(3)].get(&p("/P")).unwrap(), [NextHop { via: r(4), distance: 1 }]);
        assert_eq!(fibs[&r(2)].get(&p("/P")).unwrap(), [NextHop { via: r(1), distance: 1 }]);
        assert!(fibs[&r(1)].get(&p("/P")).unwrap().is_empty());
        assert_eq!(fib_walk(&fibs, r(0), &p("/P")).unwrap(), [r(0), r(1)]);
        let rt = compute_routes(&t, &a, hop_count);
        let ranks = rt.router(r(2)).unwrap().prt.get(&p("/P")).unwrap();
        assert_eq!(ranks[0], AnchorRank { anchor: r(1), distance: 1 });
        assert_eq!(ranks[1], AnchorRank { anchor: r(4), distance: 2 });
    }

    #[test]
    fn equal_distance_anchors_rank_by_id() {
        let t = Topology::line(3, SimTime::ZERO, 1);
        let mut a = AnchorAssignment::new();
        a.announce(r(2), p("/P")).unwrap();
        a.announce(r(0), p("/P")).unwrap();
        let rt = compute_routes(&t, &a, hop_count);
        assert_eq!(rt.router(r(1)).unwrap().prt.get(&p("/P")).unwrap()[0].anchor, r(0));
    }

    #[test]
    fn unreachable_anchor_is_absent() {
        let mut t = Topology::line(2, SimTime::ZERO, 1);
        t.add_router(r(7)).unwrap();
        let mut a = AnchorAssignment::new();
        a.announce(r(7), p("/Q")).unwrap();
        let rt = compute_routes(&t, &a, hop_count);
        assert!(rt.router(r(0)).unwrap().fab.is_empty());
        assert!(rt.router(r(0)).unwrap().prt.get(&p("/Q")).unwrap().is_empty());
        assert_eq!(rt.router(r(0)).unwrap().prt.len(), 1);
    }

    #[test]
    fn prt_resolve_uses_longest_match() {
        let t = Topology::line(3, SimTime::ZERO, 1);
        let mut a = AnchorAssignment::new();
        a.announce(r(2), p("/att")).unwrap();
        a.announce(r(1), p("/att/video")).unwrap();
        let rt = compute_routes(&t, &a, hop_count);
        let (prefix, ranks) = rt
            .router(r(0))
            .unwrap()
            .prt
            .resolve(&"/att/video/movie1".parse().unwrap())
            .unwrap();
        assert_eq!(prefix, &p("/att/video"));
        assert_eq!(ranks[0].anchor, r(1));
    }
}
