//! PIT/FIB baseline forwarding plane with best-route forwarding and
//! Interest aggregation.

use std::collections::{BTreeMap, BTreeSet};

use bytes::Bytes;
use rustc_hash::FxHashMap;

use crate::content_store::ContentStore;
use crate::control_plane::{NdnFib, RouterId};
use crate::forwarding::{DropReason, Emission, Ingress, Outcome, TraceTag};
use crate::names::{Name, NamePrefix, PrefixSet};
use crate::time::SimTime;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdnInterest {
    pub name: Name,
    pub nonce: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NdnData {
    pub name: Name,
    pub payload: Bytes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NdnMessage {
    Interest(NdnInterest),
    Data(NdnData),
}

#[derive(Clone, Debug)]
pub struct NdnConfig {
    pub pit_lifetime: SimTime,
    pub cache_capacity: Option<usize>,
    pub payload: Bytes,
}

impl Default for NdnConfig {
    fn default() -> Self {
        Self {
            pit_lifetime: SimTime::from_secs(2),
            cache_capacity: None,
            payload: Bytes::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitEntry {
    pub name: Name,
    pub nonces: BTreeSet<u32>,
    /// Waiting faces, each with the Interest instances that arrived on it.
    pub downstreams: BTreeMap<Ingress, Vec<Option<TraceTag>>>,
    pub upstream: RouterId,
    /// The instance that was sent upstream.
    pub forwarded_tag: Option<TraceTag>,
    pub created: SimTime,
}

impl PitEntry {
    fn expired(&self, now: SimTime, lifetime: SimTime) -> bool {
        self.created + lifetime < now
    }

    /// Drops for every parked instance; the forwarded one lives on upstream.
    fn expiry_drops(self, out: &mut NdnOutcome) {
        for tags in self.downstreams.into_values() {
            for tag in tags {
                if tag != self.forwarded_tag || tag.is_none() {
                    out.push(Emission::Drop {
                        reason: DropReason::PitExpired,
                        tag,
                    });
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NdnTableSizes {
    pub fib: usize,
    pub pit: usize,
    pub cs: usize,
}

type NdnOutcome = Outcome<NdnMessage>;

#[derive(Clone, Debug)]
pub struct NdnRouter {
    id: RouterId,
    fib: NdnFib,
    hosted: PrefixSet,
    pit: FxHashMap<Name, PitEntry>,
    cs: Option<ContentStore>,
    config: NdnConfig,
}

impl NdnRouter {
    pub fn new(id: RouterId, fib: NdnFib, hosted: &[NamePrefix], config: NdnConfig) -> Self {
        Self {
            id,
            fib,
            hosted: hosted.iter().cloned().map(|p| (p, ())).collect(),
            pit: FxHashMap::default(),
            cs: config.cache_capacity.map(ContentStore::new),
            config,
        }
    }

    pub fn id(&self) -> RouterId {
        self.id
    }

    pub fn fib(&self) -> &NdnFib {
        &self.fib
    }

    pub fn install_fib(&mut self, fib: NdnFib) {
        self.fib = fib;
    }

    pub fn pit_entry(&self, name: &Name) -> Option<&PitEntry> {
        self.pit.get(name)
    }

    pub fn pit_len(&self) -> usize {
        self.pit.len()
    }

    pub fn content_store(&self) -> Option<&ContentStore> {
        self.cs.as_ref()
    }

    pub fn table_sizes(&self) -> NdnTableSizes {
        NdnTableSizes {
            fib: self.fib.len(),
            pit: self.pit.len(),
            cs: self.cs.as_ref().map_or(0, ContentStore::len),
        }
    }

    fn cached(&mut self, name: &Name) -> Option<Bytes> {
        if self.hosted.longest_match(name).is_some() {
            return Some(self.config.payload.clone());
        }
        self.cs.as_mut()?.get(name)
    }

    fn reply(out: &mut NdnOutcome, face: Ingress, name: &Name, payload: Bytes, tag: Option<TraceTag>) {
        match face {
            Ingress::Consumer(c) => out.push(Emission::Deliver {
                consumers: vec![c],
                name: name.clone(),
                tag,
            }),
            Ingress::Neighbor(k) => out.push(Emission::Send {
                to: k,
                msg: NdnMessage::Data(NdnData {
                    name: name.clone(),
                    payload,
                }),
                tag,
            }),
        }
    }

    pub fn on_interest(&mut self, now: SimTime, from: Ingress, interest: &NdnInterest, tag: Option<TraceTag>) -> NdnOutcome {
        let mut out = NdnOutcome::default();
        if let Some(payload) = self.cached(&interest.name) {
            Self::reply(&mut out, from, &interest.name, payload, tag);
            return out;
        }
        out.lookups.pit += 1;
        if let Some(e) = self.pit.get(&interest.name) {
            if e.expired(now, self.config.pit_lifetime) {
                let e = self.pit.remove(&interest.name).expect("entry present");
                e.expiry_drops(&mut out);
            }
        }
        if let Some(e) = self.pit.get_mut(&interest.name) {
            if !e.nonces.insert(interest.nonce) {
                out.push(Emission::Drop {
                    reason: DropReason::DuplicateNonce,
                    tag,
                });
            } else {
                e.downstreams.entry(from).or_default().push(tag);
            }
            return out;
        }
        out.lookups.fib += 1;
        let Some(hop) = self.fib.lookup(&interest.name).and_then(|(_, hops)| hops.first()).copied() else {
            out.push(Emission::Drop {
                reason: DropReason::NoRoute,
                tag,
            });
            return out;
        };
        self.pit.insert(
            interest.name.clone(),
            PitEntry {
                name: interest.name.clone(),
                nonces: BTreeSet::from([interest.nonce]),
                downstreams: BTreeMap::from([(from, vec![tag])]),
                upstream: hop.via,
                forwarded_tag: tag,
                created: now,
            },
        );
        out.push(Emission::Send {
            to: hop.via,
            msg: NdnMessage::Interest(interest.clone()),
            tag,
        });
        out
    }

    pub fn on_data(&mut self, now: SimTime, _from: RouterId, data: &NdnData, tag: Option<TraceTag>) -> NdnOutcome {
        let mut out = NdnOutcome::default();
        out.lookups.pit += 1;
        let entry = match self.pit.remove(&data.name) {
            Some(e) if e.expired(now, self.config.pit_lifetime) => {
                e.expiry_drops(&mut out);
                None
            }
            other => other,
        };
        let Some(mut entry) = entry else {
            out.push(Emission::Drop {
                reason: DropReason::NoPit,
                tag,
            });
            return out;
        };
        if let Some(cs) = self.cs.as_mut() {
            cs.insert(data.name.clone(), data.payload.clone());
        }
        // Data for an older instance: the instance forwarded for this entry
        // is still upstream, so its face keeps waiting for it.
        if tag.is_some() && entry.forwarded_tag.is_some() && tag != entry.forwarded_tag {
            let fwd = entry.forwarded_tag;
            let face = entry
                .downstreams
                .iter()
                .find(|(_, tags)| tags.contains(&fwd))
                .map(|(f, _)| *f);
            if let Some(face) = face {
                let tags = entry.downstreams.get_mut(&face).expect("face present");
                tags.retain(|t| *t != fwd);
                if tags.is_empty() {
                    entry.downstreams.remove(&face);
                }
                let residual = PitEntry {
                    name: entry.name.clone(),
                    nonces: entry.nonces.clone(),
                    downstreams: BTreeMap::from([(face, vec![fwd])]),
                    upstream: entry.upstream,
                    forwarded_tag: fwd,
                    created: entry.created,
                };
                self.pit.insert(data.name.clone(), residual);
            }
        }
        let mut carried = false;
        for (face, tags) in entry.downstreams {
            let pick = if tag.is_some() && tags.contains(&tag) { tag } else { tags[0] };
            carried |= pick == tag;
            Self::reply(&mut out, face, &data.name, data.payload.clone(), pick);
            for t in tags.into_iter().filter(|t| *t != pick) {
                out.push(Emission::Drop {
                    reason: DropReason::Merged,
                    tag: t,
                });
            }
        }
        if !carried {
            out.push(Emission::Drop {
                reason: DropReason::Absorbed,
                tag,
            });
        }
        out
    }

    /// Removes entries older than the PIT lifetime.
    pub fn expire_pit(&mut self, now: SimTime) -> NdnOutcome {
        let mut out = NdnOutcome::default();
        let lifetime = self.config.pit_lifetime;
        let mut stale: Vec<Name> = self
            .pit
            .values()
            .filter(|e| e.expired(now, lifetime))
            .map(|e| e.name.clone())
            .collect();
        stale.sort();
        for n in stale {
            if let Some(e) = self.pit.remove(&n) {
                e.expiry_drops(&mut out);
            }
        }
        out
    }
}
