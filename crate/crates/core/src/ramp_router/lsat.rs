//! Label Swapping with Anchors Table.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::packets::Aid;
use crate::control_plane::{Distance, RouterId};
use crate::error::AidSpaceExhausted;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrevHop {
    /// This router originated the flow for local consumers.
    Local,
    Router(RouterId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LsatEntry {
    pub aid_in: Aid,
    pub prev_hop: PrevHop,
    pub next_hop: RouterId,
    pub map_out: Aid,
    pub distance: Distance,
    pub anchor: RouterId,
    pub last_used: SimTime,
}

/// Space of `bits`-wide labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AidSpace {
    bits: u8,
}

impl AidSpace {
    pub fn new(bits: u8) -> Self {
        assert!((1..=32).contains(&bits), "AID width must be 1..=32 bits");
        Self { bits }
    }

    pub fn bits(self) -> u8 {
        self.bits
    }

    pub fn mask(self) -> u32 {
        if self.bits == 32 {
            u32::MAX
        } else {
            (1u32 << self.bits) - 1
        }
    }

    pub fn size(self) -> u64 {
        1u64 << self.bits
    }

    pub fn exhausted(self) -> AidSpaceExhausted {
        AidSpaceExhausted { bits: self.bits }
    }
}

impl Default for AidSpace {
    fn default() -> Self {
        Self::new(32)
    }
}

/// Hands out MAP labels from a wrapping counter, skipping labels in use. A
/// released label comes back only after the counter wraps, so a reply still
/// in flight for the old flow cannot land on a new one.
#[derive(Clone, Debug)]
struct MapAllocator {
    space: AidSpace,
    counter: u32,
}

impl MapAllocator {
    fn allocate(&mut self, in_use: &BTreeMap<Aid, LsatEntry>) -> Result<Aid, AidSpaceExhausted> {
        if in_use.len() as u64 >= self.space.size() {
            return Err(self.space.exhausted());
        }
        loop {
            let aid = Aid(self.counter);
            self.counter = self.counter.wrapping_add(1) & self.space.mask();
            if !in_use.contains_key(&aid) {
                return Ok(aid);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lsat {
    by_map: BTreeMap<Aid, LsatEntry>,
    by_flow: FxHashMap<(Aid, PrevHop), Aid>,
    aid_in_refs: FxHashMap<Aid, u32>,
    maps: MapAllocator,
}

impl Lsat {
    /// `counter_start` picks where the MAP counter begins, so labels say
    /// nothing about the router that issued them.
    pub fn new(space: AidSpace, counter_start: u32) -> Self {
        Self {
            by_map: BTreeMap::new(),
            by_flow: FxHashMap::default(),
            aid_in_refs: FxHashMap::default(),
            maps: MapAllocator {
                space,
                counter: counter_start & space.mask(),
            },
        }
    }

    pub fn space(&self) -> AidSpace {
        self.maps.space
    }

    pub fn len(&self) -> usize {
        self.by_map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_map.is_empty()
    }

    /// Valid entries ordered by MAP.
    pub fn iter(&self) -> impl Iterator<Item = &LsatEntry> {
        self.by_map.values()
    }

    pub fn find_flow(&self, aid_in: Aid, prev_hop: PrevHop) -> Option<&LsatEntry> {
        self.by_flow.get(&(aid_in, prev_hop)).map(|m| &self.by_map[m])
    }

    pub fn find_by_map(&self, map_out: Aid) -> Option<&LsatEntry> {
        self.by_map.get(&map_out)
    }

    pub fn has_aid_in(&self, aid: Aid) -> bool {
        self.aid_in_refs.contains_key(&aid)
    }

    pub fn map_in_use(&self, aid: Aid) -> bool {
        self.by_map.contains_key(&aid)
    }

    /// A MAP unique among this table's valid entries.
    pub fn allocate_map(&mut self) -> Result<Aid, AidSpaceExhausted> {
        self.maps.allocate(&self.by_map)
    }

    /// Adds a fresh entry. The flow key and MAP must both be unused.
    pub fn insert(&mut self, entry: LsatEntry) {
        let flow = (entry.aid_in, entry.prev_hop);
        assert!(!self.by_flow.contains_key(&flow), "flow already has an entry");
        assert!(!self.by_map.contains_key(&entry.map_out), "MAP already in use");
        self.by_flow.insert(flow, entry.map_out);
        *self.aid_in_refs.entry(entry.aid_in).or_insert(0) += 1;
        self.by_map.insert(entry.map_out, entry);
    }

    pub fn touch(&mut self, map_out: Aid, now: SimTime) {
        if let Some(e) = self.by_map.get_mut(&map_out) {
            e.last_used = now;
        }
    }

    /// Removes the entry with `map_out`; its MAP becomes reusable.
    pub fn invalidate(&mut self, map_out: Aid) -> Option<LsatEntry> {
        let e = self.by_map.remove(&map_out)?;
        self.by_flow.remove(&(e.aid_in, e.prev_hop));
        if let Some(n) = self.aid_in_refs.get_mut(&e.aid_in) {
            *n -= 1;
            if *n == 0 {
                self.aid_in_refs.remove(&e.aid_in);
            }
        }
        Some(e)
    }

    /// MAPs of entries forwarding to `next_hop`, ascending.
    pub fn maps_via(&self, next_hop: RouterId) -> Vec<Aid> {
        self.by_map
            .values()
            .filter(|e| e.next_hop == next_hop)
            .map(|e| e.map_out)
            .collect()
    }

    /// Drops entries idle for longer than `ttl`.
    pub fn evict_idle(&mut self, now: SimTime, ttl: SimTime) -> Vec<LsatEntry> {
        let stale: Vec<Aid> = self
            .by_map
            .values()
            .filter(|e| e.last_used + ttl < now)
            .map(|e| e.map_out)
            .collect();
        stale.into_iter().filter_map(|m| self.invalidate(m)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(aid: u32, prev: PrevHop, map: Aid) -> LsatEntry {
        LsatEntry {
            aid_in: Aid(aid),
            prev_hop: prev,
            next_hop: RouterId(9),
            map_out: map,
            distance: 3,
            anchor: RouterId(7),
            last_used: SimTime::ZERO,
        }
    }

    #[test]
    fn maps_are_distinct_and_not_reissued_early() {
        let mut t = Lsat::new(AidSpace::default(), 100);
        let m1 = t.allocate_map().unwrap();
        t.insert(entry(1, PrevHop::Router(RouterId(1)), m1));
        let m2 = t.allocate_map().unwrap();
        assert_ne!(m1, m2);
        t.insert(entry(1, PrevHop::Router(RouterId(2)), m2));
        assert!(t.has_aid_in(Aid(1)));
        t.invalidate(m1).unwrap();
        assert!(t.has_aid_in(Aid(1)));
        let m3 = t.allocate_map().unwrap();
        assert!(m3 != m1 && m3 != m2);
        t.invalidate(m2).unwrap();
        assert!(!t.has_aid_in(Aid(1)));
    }

    #[test]
    fn released_map_returns_after_wraparound() {
        let mut t = Lsat::new(AidSpace::new(4), 5);
        let maps: Vec<Aid> = (0..16)
            .map(|i| {
                let m = t.allocate_map().unwrap();
                t.insert(entry(i, PrevHop::Local, m));
                m
            })
            .collect();
        t.invalidate(maps[3]).unwrap();
        assert_eq!(t.allocate_map().unwrap(), maps[3]);
    }

    #[test]
    fn same_aid_from_different_neighbors_are_separate_flows() {
        let mut t = Lsat::new(AidSpace::default(), 0);
        let a = t.allocate_map().unwrap();
        t.insert(entry(49, PrevHop::Router(RouterId(1)), a));
        let b = t.allocate_map().unwrap();
        t.insert(entry(49, PrevHop::Local, b));
        assert_eq!(t.find_flow(Aid(49), PrevHop::Router(RouterId(1))).unwrap().map_out, a);
        assert_eq!(t.find_flow(Aid(49), PrevHop::Local).unwrap().map_out, b);
        assert!(t.find_flow(Aid(49), PrevHop::Router(RouterId(2))).is_none());
    }

    #[test]
    fn small_space_exhausts() {
        let mut t = Lsat::new(AidSpace::new(4), 0);
        for i in 0..16 {
            let m = t.allocate_map().unwrap();
            t.insert(entry(i, PrevHop::Local, m));
        }
        assert_eq!(t.allocate_map(), Err(AidSpaceExhausted { bits: 4 }));
        t.invalidate(Aid(5)).unwrap();
        assert_eq!(t.allocate_map(), Ok(Aid(5)));
    }

    #[test]
    fn counter_wraps_past_live_labels() {
        let mut t = Lsat::new(AidSpace::new(2), 3);
        let first = t.allocate_map().unwrap();
        assert_eq!(first, Aid(3));
        t.insert(entry(0, PrevHop::Local, first));
        assert_eq!(t.allocate_map().unwrap(), Aid(0));
    }

    #[test]
    fn evicts_only_idle_entries() {
        let mut t = Lsat::new(AidSpace::default(), 0);
        let a = t.allocate_map().unwrap();
        t.insert(entry(1, PrevHop::Local, a));
        let b = t.allocate_map().unwrap();
        t.insert(entry(2, PrevHop::Local, b));
        t.touch(b, SimTime::from_secs(5));
        let gone = t.evict_idle(SimTime::from_secs(11), SimTime::from_secs(10));
        assert_eq!(gone.len(), 1);
        assert_eq!(gone[0].map_out, a);
        assert_eq!(t.len(), 1);
    }
}
