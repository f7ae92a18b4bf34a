//! Fixed-capacity LRU store of content objects, keyed by exact name.

use std::collections::BTreeMap;

use bytes::Bytes;
use rustc_hash::FxHashMap;

use crate::names::Name;

#[derive(Clone, Debug)]
struct Slot {
    payload: Bytes,
    stamp: u64,
}

#[derive(Clone, Debug)]
pub struct ContentStore {
    capacity: usize,
    entries: FxHashMap<Name, Slot>,
    recency: BTreeMap<u64, Name>,
    clock: u64,
}

impl ContentStore {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: FxHashMap::default(),
            recency: BTreeMap::new(),
            clock: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    /// Exact-name lookup; a hit becomes the most recently used entry.
    pub fn get(&mut self, name: &Name) -> Option<Bytes> {
        let stamp = self.tick();
        let slot = self.entries.get_mut(name)?;
        self.recency.remove(&slot.stamp);
        slot.stamp = stamp;
        self.recency.insert(stamp, name.clone());
        Some(slot.payload.clone())
    }

    pub fn contains(&self, name: &Name) -> bool {
        self.entries.contains_key(name)
    }

    /// Inserts or refreshes `name`; returns the evicted name when a new
    /// entry pushed the store past capacity.
    pub fn insert(&mut self, name: Name, payload: Bytes) -> Option<Name> {
        if self.capacity == 0 {
            return None;
        }
        let stamp = self.tick();
        if let Some(slot) = self.entries.get_mut(&name) {
            self.recency.remove(&slot.stamp);
            slot.stamp = stamp;
            slot.payload = payload;
            self.recency.insert(stamp, name);
            return None;
        }
        let mut evicted = None;
        if self.entries.len() == self.capacity {
            if let Some((_, oldest)) = self.recency.pop_first() {
                self.entries.remove(&oldest);
                evicted = Some(oldest);
            }
        }
        self.recency.insert(stamp, name.clone());
        self.entries.insert(name, Slot { payload, stamp });
        evicted
    }
}
