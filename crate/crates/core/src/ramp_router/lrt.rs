//! Local Request Table: which local consumers wait for which CO.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap;

use crate::control_plane::RouterId;
use crate::forwarding::ConsumerId;
use crate::names::Name;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrtEntry {
    pub name: Name,
    pub consumers: BTreeSet<ConsumerId>,
    /// Anchor the name was last bound to; lets a label-only error (which
    /// carries no name) be demultiplexed.
    pub anchor: Option<RouterId>,
}

#[derive(Clone, Debug, Default)]
pub struct Lrt {
    entries: FxHashMap<Name, LrtEntry>,
}

impl Lrt {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &Name) -> Option<&LrtEntry> {
        self.entries.get(name)
    }

    pub fn add(&mut self, name: &Name, consumer: ConsumerId) {
        self.entries
            .entry(name.clone())
            .or_insert_with(|| LrtEntry {
                name: name.clone(),
                consumers: BTreeSet::new(),
                anchor: None,
            })
            .consumers
            .insert(consumer);
    }

    pub fn bind(&mut self, name: &Name, anchor: RouterId) {
        if let Some(e) = self.entries.get_mut(name) {
            e.anchor = Some(anchor);
        }
    }

    pub fn remove_consumer(&mut self, name: &Name, consumer: ConsumerId) {
        if let Some(e) = self.entries.get_mut(name) {
            e.consumers.remove(&consumer);
            if e.consumers.is_empty() {
                self.entries.remove(name);
            }
        }
    }

    /// Removes and returns the entry for `name`.
    pub fn take(&mut self, name: &Name) -> Option<LrtEntry> {
        self.entries.remove(name)
    }

    /// Removes every entry bound to `anchor`, returning one
    /// (consumer, name) pair per waiting request in sorted order.
    pub fn take_bound_to(&mut self, anchor: RouterId) -> Vec<(ConsumerId, Name)> {
        let mut names: Vec<Name> = self
            .entries
            .values()
            .filter(|e| e.anchor == Some(anchor))
            .map(|e| e.name.clone())
            .collect();
        names.sort();
        let mut out = Vec::new();
        for n in names {
            if let Some(e) = self.entries.remove(&n) {
                out.extend(e.consumers.into_iter().map(|c| (c, n.clone())));
            }
        }
        out.sort();
        out
    }
}
