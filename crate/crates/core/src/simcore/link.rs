use rustc_hash::FxHashMap;

use crate::control_plane::{RouterId, Topology};
use crate::time::SimTime;

#[derive(Clone, Debug)]
pub struct LinkState {
    pub a: RouterId,
    pub b: RouterId,
    pub delay: SimTime,
    pub rate_bps: u64,
    /// Transmitter free time, indexed by direction (0: a to b, 1: b to a).
    pub busy_until: [SimTime; 2],
    pub up: bool,
}

impl LinkState {
    /// Queues a packet of `bits` for transmission from `from`; returns its
    /// arrival time at the far end.
    pub fn transmit(&mut self, now: SimTime, from: RouterId, bits: u64) -> SimTime {
        let dir = usize::from(from != self.a);
        let depart = now.max(self.busy_until[dir]);
        let done = depart + SimTime::serialization(bits, self.rate_bps);
        self.busy_until[dir] = done;
        done + self.delay
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinkTable {
    links: Vec<LinkState>,
    index: FxHashMap<(RouterId, RouterId), usize>,
}

impl LinkTable {
    pub fn new(topology: &Topology) -> Self {
        let mut t = LinkTable::default();
        for l in topology.links() {
            let i = t.links.len();
            t.links.push(LinkState {
                a: l.a,
                b: l.b,
                delay: l.delay,
                rate_bps: l.rate_bps,
                busy_until: [SimTime::ZERO; 2],
                up: true,
            });
            t.index.insert((l.a, l.b), i);
            t.index.insert((l.b, l.a), i);
        }
        t
    }

    pub fn find(&self, x: RouterId, y: RouterId) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    pub fn get(&self, i: usize) -> &LinkState {
        &self.links[i]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut LinkState {
        &mut self.links[i]
    }

    pub fn is_up(&self, x: RouterId, y: RouterId) -> bool {
        self.find(x, y).is_some_and(|i| self.links[i].up)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifo_serialization_per_direction() {
        let t = Topology::line(2, SimTime::from_millis(30), 10_000_000_000);
        let mut links = LinkTable::new(&t);
        let i = links.find(RouterId(0), RouterId(1)).unwrap();
        let l = links.get_mut(i);
        let ser = SimTime::serialization(512, 10_000_000_000);
        let first = l.transmit(SimTime::ZERO, RouterId(0), 512);
        assert_eq!(first, ser + SimTime::from_millis(30));
        let second = l.transmit(SimTime::ZERO, RouterId(0), 512);
        assert_eq!(second, first + ser);
        // The reverse direction has its own transmitter.
        assert_eq!(l.transmit(SimTime::ZERO, RouterId(1), 512), first);
    }
}
