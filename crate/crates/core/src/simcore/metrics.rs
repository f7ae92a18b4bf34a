use std::collections::BTreeMap;

use super::scenario::Mode;
use crate::control_plane::RouterId;
use crate::forwarding::LookupCounts;
use crate::time::SimTime;

/// Forwarding-table sizes of one router at one instant. Tables the plane
/// does not have stay zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableSizes {
    pub prt: usize,
    pub fab: usize,
    pub lsat: usize,
    pub fib: usize,
    pub pit: usize,
    pub cs: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TableMeans {
    pub prt: f64,
    pub fab: f64,
    pub lsat: f64,
    pub fib: f64,
    pub pit: f64,
    pub cs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TableKind {
    Prt,
    Fab,
    Lsat,
    Fib,
    Pit,
    Cs,
}

impl TableMeans {
    pub fn get(&self, kind: TableKind) -> f64 {
        match kind {
            TableKind::Prt => self.prt,
            TableKind::Fab => self.fab,
            TableKind::Lsat => self.lsat,
            TableKind::Fib => self.fib,
            TableKind::Pit => self.pit,
            TableKind::Cs => self.cs,
        }
    }
}

/// Running per-router sums of table sizes.
#[derive(Clone, Debug, Default)]
pub(crate) struct TableAccumulator {
    sums: BTreeMap<RouterId, [u64; 6]>,
    pub(crate) samples: usize,
}

impl TableAccumulator {
    pub(crate) fn add(&mut self, router: RouterId, s: TableSizes) {
        let e = self.sums.entry(router).or_default();
        for (slot, v) in e.iter_mut().zip([s.prt, s.fab, s.lsat, s.fib, s.pit, s.cs]) {
            *slot += v as u64;
        }
    }

    pub(crate) fn means(&self) -> BTreeMap<RouterId, TableMeans> {
        let n = self.samples.max(1) as f64;
        self.sums
            .iter()
            .map(|(r, s)| {
                let m = |i: usize| s[i] as f64 / n;
                (
                    *r,
                    TableMeans {
                        prt: m(0),
                        fab: m(1),
                        lsat: m(2),
                        fib: m(3),
                        pit: m(4),
                        cs: m(5),
                    },
                )
            })
            .collect()
    }
}

/// Everything measured in one run. Quantities marked "window" cover only
/// activity after warmup.
#[derive(Clone, Debug, PartialEq)]
pub struct RunMetrics {
    pub mode: Mode,
    pub rate: f64,
    pub seed: u64,
    pub horizon: SimTime,
    pub warmup: SimTime,
    pub routers: usize,
    pub consumers: usize,
    /// Per-router means over window samples.
    pub tables: BTreeMap<RouterId, TableMeans>,
    pub samples: usize,
    /// Lookups of window Interest instances and their replies.
    pub lookups: LookupCounts,
    /// Window Interest instances whose content reached a consumer.
    pub retrievals: u64,
    /// Window requests completed, with their end-to-end delay.
    pub delays_ms: Vec<f64>,
    /// Hop distance from origin to bound anchor, summed over window
    /// first transmissions.
    pub path_hops_sum: u64,
    pub path_hops_count: u64,
    /// Interests sent by each router during the window.
    pub interests_sent: BTreeMap<RouterId, u64>,
    pub requests: u64,
    pub completed: u64,
    pub failed: u64,
    pub retransmissions: u64,
    pub timeouts: u64,
    pub drops: BTreeMap<String, u64>,
    pub notifications: BTreeMap<String, u64>,
    pub events: u64,
}

impl RunMetrics {
    pub(crate) fn new(mode: Mode, rate: f64, seed: u64, horizon: SimTime, warmup: SimTime) -> Self {
        Self {
            mode,
            rate,
            seed,
            horizon,
            warmup,
            routers: 0,
            consumers: 0,
            tables: BTreeMap::new(),
            samples: 0,
            lookups: LookupCounts::default(),
            retrievals: 0,
            delays_ms: Vec::new(),
            path_hops_sum: 0,
            path_hops_count: 0,
            interests_sent: BTreeMap::new(),
            requests: 0,
            completed: 0,
            failed: 0,
            retransmissions: 0,
            timeouts: 0,
            drops: BTreeMap::new(),
            notifications: BTreeMap::new(),
            events: 0,
        }
    }

    /// Mean over routers of each router's mean table size.
    pub fn mean_table(&self, kind: TableKind) -> f64 {
        if self.tables.is_empty() {
            return 0.0;
        }
        self.tables.values().map(|t| t.get(kind)).sum::<f64>() / self.tables.len() as f64
    }

    pub fn lookups_per_retrieval(&self) -> [f64; 5] {
        let n = self.retrievals.max(1) as f64;
        let l = self.lookups;
        [l.prt, l.fab, l.lsat, l.fib, l.pit].map(|v| v as f64 / n)
    }

    pub fn mean_delay_ms(&self) -> f64 {
        if self.delays_ms.is_empty() {
            return 0.0;
        }
        self.delays_ms.iter().sum::<f64>() / self.delays_ms.len() as f64
    }

    pub fn mean_path_hops(&self) -> f64 {
        self.path_hops_sum as f64 / self.path_hops_count.max(1) as f64
    }

    /// Mean over all routers (including those that sent none).
    pub fn mean_interests_per_router(&self) -> f64 {
        let total: u64 = self.interests_sent.values().sum();
        total as f64 / self.routers.max(1) as f64
    }
}
