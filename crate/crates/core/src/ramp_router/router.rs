use std::collections::BTreeMap;

use bytes::Bytes;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lrt::Lrt;
use super::lsat::{AidSpace, Lsat, LsatEntry, PrevHop};
use super::packets::{Aid, DataPacket, ErrorCode, ErrorMessage, Interest, Message};
use crate::content_store::ContentStore;
use crate::control_plane::{Distance, RouterId, RouterRoutes};
use crate::error::AidSpaceExhausted;
use crate::forwarding::{ConsumerId, DropReason, Emission, Ingress, Outcome, TraceTag};
use crate::names::{Name, NamePrefix, PrefixSet};
use crate::time::SimTime;

/// Labels below this are never drawn when the space is wide enough, so no
/// label can coincide with a small router or consumer id.
const LOW_LABELS: u32 = 1 << 16;

#[derive(Clone, Debug)]
pub struct RampConfig {
    pub aid_bits: u8,
    pub lsat_ttl: SimTime,
    /// `None` disables on-path caching.
    pub cache_capacity: Option<usize>,
    /// Content returned by anchors.
    pub payload: Bytes,
    /// First MAP the label counter issues; drawn at random when `None`.
    pub map_counter_start: Option<u32>,
}

impl Default for RampConfig {
    fn default() -> Self {
        Self {
            aid_bits: 32,
            lsat_ttl: SimTime::from_secs(10),
            cache_capacity: None,
            payload: Bytes::new(),
            map_counter_start: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RampTableSizes {
    pub prt: usize,
    pub fab: usize,
    pub lsat: usize,
    pub cs: usize,
}

/// The ALF admission rule. `existing` is the distance stored for the flow
/// at this router, `incoming` the distance stated by the sender (`None`
/// for a consumer, which sits at infinite distance), `candidate` the FAB
/// distance via the hop under consideration.
pub fn alf_condition(existing: Option<Distance>, incoming: Option<Distance>, candidate: Distance) -> bool {
    let bound = existing.unwrap_or(candidate);
    incoming.is_none_or(|d| d > bound)
}

type RampOutcome = Outcome<Message>;

#[derive(Clone, Debug)]
pub struct RampRouter {
    id: RouterId,
    routes: RouterRoutes,
    hosted: PrefixSet,
    lsat: Lsat,
    lrt: Lrt,
    cs: Option<ContentStore>,
    origin_aids: BTreeMap<RouterId, Aid>,
    rng: ChaCha8Rng,
    config: RampConfig,
}

impl RampRouter {
    pub fn new(id: RouterId, routes: RouterRoutes, hosted: &[NamePrefix], config: RampConfig, seed: u64) -> Self {
        let space = AidSpace::new(config.aid_bits);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let drawn = if space.mask() >= 1 << 31 {
            rng.random_range(LOW_LABELS..1 << 31)
        } else {
            rng.random_range(0..=space.mask())
        };
        let start = config.map_counter_start.unwrap_or(drawn);
        Self {
            id,
            routes,
            hosted: hosted.iter().cloned().map(|p| (p, ())).collect(),
            lsat: Lsat::new(space, start),
            lrt: Lrt::default(),
            cs: config.cache_capacity.map(ContentStore::new),
            origin_aids: BTreeMap::new(),
            rng,
            config,
        }
    }

    pub fn id(&self) -> RouterId {
        self.id
    }

    pub fn routes(&self) -> &RouterRoutes {
        &self.routes
    }

    /// Replaces the PRT and FAB after a routing update. Forwarding state is
    /// kept; new flows follow the new tables.
    pub fn install_routes(&mut self, routes: RouterRoutes) {
        self.routes = routes;
    }

    pub fn lsat(&self) -> &Lsat {
        &self.lsat
    }

    pub fn lrt(&self) -> &Lrt {
        &self.lrt
    }

    pub fn content_store(&self) -> Option<&ContentStore> {
        self.cs.as_ref()
    }

    pub fn origin_aid(&self, anchor: RouterId) -> Option<Aid> {
        self.origin_aids.get(&anchor).copied()
    }

    pub fn table_sizes(&self) -> RampTableSizes {
        RampTableSizes {
            prt: self.routes.prt.len(),
            fab: self.routes.fab.len(),
            lsat: self.lsat.len(),
            cs: self.cs.as_ref().map_or(0, ContentStore::len),
        }
    }

    pub fn evict_idle(&mut self, now: SimTime) -> usize {
        self.lsat.evict_idle(now, self.config.lsat_ttl).len()
    }

    pub fn hosts(&self, name: &Name) -> bool {
        self.hosted.longest_match(name).is_some()
    }

    /// Whether this router would admit `interest`, received from `from`,
    /// for forwarding through `candidate`.
    pub fn alf_admits(&self, from: RouterId, interest: &Interest, candidate: RouterId) -> bool {
        let existing = self
            .lsat
            .find_flow(interest.aid, PrevHop::Router(from))
            .map(|e| e.distance);
        match (existing, self.routes.fab.distance_via(interest.anchor, candidate)) {
            (Some(_), _) => alf_condition(existing, Some(interest.distance), 0),
            (None, Some(d)) => alf_condition(None, Some(interest.distance), d),
            (None, None) => false,
        }
    }

    /// Stable label for flows this router originates toward `anchor`.
    pub fn allocate_origin_aid(&mut self, anchor: RouterId) -> Result<Aid, AidSpaceExhausted> {
        if let Some(aid) = self.origin_aids.get(&anchor) {
            return Ok(*aid);
        }
        let space = self.lsat.space();
        let taken = |s: &Self, a: Aid| s.lsat.has_aid_in(a) || s.origin_aids.values().any(|x| *x == a);
        let low = if space.bits() > 20 { LOW_LABELS } else { 0 };
        for _ in 0..64 {
            let a = Aid(self.rng.random_range(low..=space.mask()));
            if !taken(self, a) {
                self.origin_aids.insert(anchor, a);
                return Ok(a);
            }
        }
        // Nearly full space: scan from a random start.
        let start = self.rng.random_range(0..=space.mask()) as u64;
        for k in 0..space.size() {
            let a = Aid(((start + k) & space.mask() as u64) as u32);
            if !taken(self, a) {
                self.origin_aids.insert(anchor, a);
                return Ok(a);
            }
        }
        Err(space.exhausted())
    }

    pub fn allocate_map(&mut self) -> Result<Aid, AidSpaceExhausted> {
        self.lsat.allocate_map()
    }

    fn expired(&self, e: &LsatEntry, now: SimTime) -> bool {
        e.last_used + self.config.lsat_ttl < now
    }

    /// Valid, unexpired entry whose MAP is `aid`.
    fn live_by_map(&mut self, aid: Aid, now: SimTime) -> Option<LsatEntry> {
        let e = self.lsat.find_by_map(aid)?;
        if self.expired(e, now) {
            self.lsat.invalidate(aid);
            return None;
        }
        Some(e.clone())
    }

    fn cached(&mut self, name: &Name) -> Option<Bytes> {
        if self.hosts(name) {
            return Some(self.config.payload.clone());
        }
        self.cs.as_mut()?.get(name)
    }

    fn reply_error(&mut self, out: &mut RampOutcome, ingress: Ingress, interest: &Interest, code: ErrorCode, tag: Option<TraceTag>) {
        match ingress {
            Ingress::Consumer(c) => {
                self.lrt.remove_consumer(&interest.name, c);
                out.push(Emission::Notify {
                    targets: vec![(c, interest.name.clone())],
                    code,
                    tag,
                });
            }
            Ingress::Neighbor(k) => out.push(Emission::Send {
                to: k,
                msg: Message::Error(ErrorMessage {
                    name: Some(interest.name.clone()),
                    aid: interest.aid,
                    anchor: Some(interest.anchor),
                    code,
                }),
                tag,
            }),
        }
    }

    /// Interest from a local consumer; only the name is meaningful.
    pub fn on_consumer_interest(&mut self, now: SimTime, consumer: ConsumerId, name: &Name, tag: Option<TraceTag>) -> RampOutcome {
        let mut out = RampOutcome::default();
        if self.cached(name).is_some() {
            out.push(Emission::Deliver {
                consumers: vec![consumer],
                name: name.clone(),
                tag,
            });
            return out;
        }
        self.lrt.add(name, consumer);
        out.lookups.prt += 1;
        let anchor = match self.routes.prt.resolve(name).and_then(|(_, ranks)| ranks.first()) {
            Some(r) => r.anchor,
            None => {
                self.lrt.remove_consumer(name, consumer);
                out.push(Emission::Notify {
                    targets: vec![(consumer, name.clone())],
                    code: ErrorCode::NoRoute,
                    tag,
                });
                return out;
            }
        };
        self.lrt.bind(name, anchor);
        let aid = match self.allocate_origin_aid(anchor) {
            Ok(a) => a,
            Err(_) => {
                self.lrt.remove_consumer(name, consumer);
                out.push(Emission::Drop {
                    reason: DropReason::AidSpaceExhausted,
                    tag,
                });
                return out;
            }
        };
        let interest = Interest {
            name: name.clone(),
            aid,
            anchor,
            distance: Distance::MAX,
        };
        self.forward(now, Ingress::Consumer(consumer), &interest, None, tag, &mut out);
        out
    }

    /// Interest received from neighbor `from`.
    pub fn on_interest(&mut self, now: SimTime, from: RouterId, interest: &Interest, tag: Option<TraceTag>) -> RampOutcome {
        let mut out = RampOutcome::default();
        if let Some(payload) = self.cached(&interest.name) {
            out.push(Emission::Send {
                to: from,
                msg: Message::Data(DataPacket {
                    name: interest.name.clone(),
                    aid: interest.aid,
                    payload,
                    sp: Bytes::new(),
                }),
                tag,
            });
            return out;
        }
        if interest.anchor == self.id {
            self.reply_error(&mut out, Ingress::Neighbor(from), interest, ErrorCode::NoContent, tag);
            return out;
        }
        self.forward(now, Ingress::Neighbor(from), interest, Some(interest.distance), tag, &mut out);
        out
    }

    fn forward(
        &mut self,
        now: SimTime,
        ingress: Ingress,
        interest: &Interest,
        incoming: Option<Distance>,
        tag: Option<TraceTag>,
        out: &mut RampOutcome,
    ) {
        let prev = match ingress {
            Ingress::Consumer(_) => PrevHop::Local,
            Ingress::Neighbor(k) => PrevHop::Router(k),
        };
        out.lookups.lsat += 1;
        if let Some(e) = self.lsat.find_flow(interest.aid, prev) {
            let usable =
                e.anchor == interest.anchor && alf_condition(Some(e.distance), incoming, 0) && !self.expired(e, now);
            let map = e.map_out;
            if usable {
                let (next, distance) = (e.next_hop, e.distance);
                self.lsat.touch(map, now);
                out.push(Emission::Send {
                    to: next,
                    msg: Message::Interest(Interest {
                        name: interest.name.clone(),
                        aid: map,
                        anchor: interest.anchor,
                        distance,
                    }),
                    tag,
                });
                return;
            }
            // Left over from an earlier flow that reused this label.
            self.lsat.invalidate(map);
        }

        out.lookups.fab += 1;
        let hops = self.routes.fab.get(interest.anchor);
        if hops.is_empty() {
            self.reply_error(out, ingress, interest, ErrorCode::NoRoute, tag);
            return;
        }
        let Some(hop) = hops.iter().find(|h| alf_condition(None, incoming, h.distance)).copied() else {
            self.reply_error(out, ingress, interest, ErrorCode::Loop, tag);
            return;
        };
        let map = match self.lsat.allocate_map() {
            Ok(m) => m,
            Err(_) => {
                if let Ingress::Consumer(c) = ingress {
                    self.lrt.remove_consumer(&interest.name, c);
                }
                out.push(Emission::Drop {
                    reason: DropReason::AidSpaceExhausted,
                    tag,
                });
                return;
            }
        };
        self.lsat.insert(LsatEntry {
            aid_in: interest.aid,
            prev_hop: prev,
            next_hop: hop.via,
            map_out: map,
            distance: hop.distance,
            anchor: interest.anchor,
            last_used: now,
        });
        out.push(Emission::Send {
            to: hop.via,
            msg: Message::Interest(Interest {
                name: interest.name.clone(),
                aid: map,
                anchor: interest.anchor,
                distance: hop.distance,
            }),
            tag,
        });
    }

    pub fn on_data(&mut self, now: SimTime, _from: RouterId, dp: &DataPacket, tag: Option<TraceTag>) -> RampOutcome {
        let mut out = RampOutcome::default();
        out.lookups.lsat += 1;
        let Some(e) = self.live_by_map(dp.aid, now) else {
            out.push(Emission::Drop {
                reason: DropReason::UnknownAid,
                tag,
            });
            return out;
        };
        self.lsat.touch(e.map_out, now);
        if let Some(cs) = self.cs.as_mut() {
            cs.insert(dp.name.clone(), dp.payload.clone());
        }
        match e.prev_hop {
            PrevHop::Local => match self.lrt.take(&dp.name) {
                Some(entry) => out.push(Emission::Deliver {
                    consumers: entry.consumers.into_iter().collect(),
                    name: dp.name.clone(),
                    tag,
                }),
                None => out.push(Emission::Drop {
                    reason: DropReason::NoConsumer,
                    tag,
                }),
            },
            PrevHop::Router(k) => out.push(Emission::Send {
                to: k,
                msg: Message::Data(DataPacket {
                    name: dp.name.clone(),
                    aid: e.aid_in,
                    payload: dp.payload.clone(),
                    sp: dp.sp.clone(),
                }),
                tag,
            }),
        }
        out
    }

    /// Consumers waiting at this origin on the flow `e`.
    fn local_targets(&mut self, e: &LsatEntry, name: Option<&Name>) -> Vec<(ConsumerId, Name)> {
        match name {
            Some(n) => self
                .lrt
                .take(n)
                .map(|entry| entry.consumers.into_iter().map(|c| (c, n.clone())).collect())
                .unwrap_or_default(),
            None => self.lrt.take_bound_to(e.anchor),
        }
    }

    pub fn on_error(&mut self, now: SimTime, _from: RouterId, err: &ErrorMessage, tag: Option<TraceTag>) -> RampOutcome {
        let mut out = RampOutcome::default();
        out.lookups.lsat += 1;
        let Some(e) = self.live_by_map(err.aid, now) else {
            out.push(Emission::Drop {
                reason: DropReason::UnknownAid,
                tag,
            });
            return out;
        };
        self.lsat.invalidate(e.map_out);
        match e.prev_hop {
            PrevHop::Local => {
                let targets = self.local_targets(&e, err.name.as_ref());
                out.push(Emission::Notify {
                    targets,
                    code: err.code,
                    tag,
                });
            }
            PrevHop::Router(k) => out.push(Emission::Send {
                to: k,
                msg: Message::Error(ErrorMessage {
                    name: err.name.clone(),
                    aid: e.aid_in,
                    anchor: err.anchor,
                    code: err.code,
                }),
                tag,
            }),
        }
        out
    }

    /// The link to `neighbor` went down: every flow forwarded over it is
    /// torn down and its upstream told so.
    pub fn on_link_failure(&mut self, _now: SimTime, neighbor: RouterId) -> RampOutcome {
        let mut out = RampOutcome::default();
        for map in self.lsat.maps_via(neighbor) {
            let Some(e) = self.lsat.invalidate(map) else { continue };
            match e.prev_hop {
                PrevHop::Local => {
                    let targets = self.local_targets(&e, None);
                    out.push(Emission::Notify {
                        targets,
                        code: ErrorCode::LinkFailure,
                        tag: None,
                    });
                }
                PrevHop::Router(k) => out.push(Emission::Send {
                    to: k,
                    msg: Message::Error(ErrorMessage {
                        name: None,
                        aid: e.aid_in,
                        anchor: None,
                        code: ErrorCode::LinkFailure,
                    }),
                    tag: None,
                }),
            }
        }
        out
    }
}
