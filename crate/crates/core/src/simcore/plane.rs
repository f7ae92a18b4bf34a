//! The two forwarding planes behind one interface for the event loop.

use std::fmt::Write;

use super::metrics::TableSizes;
use super::scenario::{Inconsistency, PacketSizes, SimConfig};
use crate::control_plane::{
    build_ndn_fibs, compute_routes, hop_count, inject_inconsistency, AnchorAssignment, RouteTables, RouterId, Topology,
};
use crate::forwarding::{ConsumerId, Ingress, Outcome, TraceTag};
use crate::names::Name;
use crate::ndn_router::{NdnConfig, NdnInterest, NdnMessage, NdnRouter};
use crate::ramp_router::{Message, RampConfig, RampRouter};
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsgKind {
    Interest,
    Data,
    Error,
}

pub trait Plane {
    type Msg: Clone;

    fn consumer_interest(
        &mut self,
        at: usize,
        now: SimTime,
        consumer: ConsumerId,
        name: &Name,
        nonce: u32,
        tag: Option<TraceTag>,
    ) -> Outcome<Self::Msg>;

    fn receive(&mut self, at: usize, now: SimTime, from: RouterId, msg: &Self::Msg, tag: Option<TraceTag>)
        -> Outcome<Self::Msg>;

    fn link_failed(&mut self, at: usize, now: SimTime, neighbor: RouterId) -> Outcome<Self::Msg>;

    /// Installs routes recomputed for `topology`.
    fn reroute(&mut self, topology: &Topology, anchors: &AnchorAssignment);

    /// Periodic table maintenance.
    fn housekeeping(&mut self, at: usize, now: SimTime) -> Outcome<Self::Msg>;

    fn sizes(&self, at: usize) -> TableSizes;

    fn kind(msg: &Self::Msg) -> MsgKind;

    fn bytes(sizes: &PacketSizes, msg: &Self::Msg) -> u64 {
        match Self::kind(msg) {
            MsgKind::Interest => sizes.interest,
            MsgKind::Data => sizes.data,
            MsgKind::Error => sizes.error,
        }
    }

    /// Appends the message's trace fields after `tag` and `to`.
    fn describe(msg: &Self::Msg, out: &mut String);
}

fn ramp_routes(topology: &Topology, anchors: &AnchorAssignment, inconsistency: Option<Inconsistency>) -> RouteTables {
    let rt = compute_routes(topology, anchors, hop_count);
    match inconsistency {
        Some(i) if i.severity > 0.0 => inject_inconsistency(&rt, i.seed, i.severity),
        _ => rt,
    }
}

fn router_seed(run_seed: u64, id: RouterId) -> u64 {
    run_seed ^ 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(id.0 as u64 + 1)
}

pub struct RampPlane {
    routers: Vec<RampRouter>,
    inconsistency: Option<Inconsistency>,
}

impl RampPlane {
    pub fn new(topology: &Topology, anchors: &AnchorAssignment, config: &SimConfig) -> Self {
        let rt = ramp_routes(topology, anchors, config.inconsistency);
        let rc = RampConfig {
            aid_bits: config.aid_bits,
            lsat_ttl: config.lsat_ttl,
            cache_capacity: config.cache.capacity(),
            ..RampConfig::default()
        };
        let routers = topology
            .routers()
            .iter()
            .map(|&id| {
                let routes = rt.router(id).expect("every router has routes").clone();
                RampRouter::new(id, routes, anchors.prefixes_of(id), rc.clone(), router_seed(config.seed, id))
            })
            .collect();
        Self {
            routers,
            inconsistency: config.inconsistency,
        }
    }

    pub fn router(&self, at: usize) -> &RampRouter {
        &self.routers[at]
    }
}

impl Plane for RampPlane {
    type Msg = Message;

    fn consumer_interest(
        &mut self,
        at: usize,
        now: SimTime,
        consumer: ConsumerId,
        name: &Name,
        _nonce: u32,
        tag: Option<TraceTag>,
    ) -> Outcome<Message> {
        self.routers[at].on_consumer_interest(now, consumer, name, tag)
    }

    fn receive(&mut self, at: usize, now: SimTime, from: RouterId, msg: &Message, tag: Option<TraceTag>) -> Outcome<Message> {
        let r = &mut self.routers[at];
        match msg {
            Message::Interest(i) => r.on_interest(now, from, i, tag),
            Message::Data(d) => r.on_data(now, from, d, tag),
            Message::Error(e) => r.on_error(now, from, e, tag),
        }
    }

    fn link_failed(&mut self, at: usize, now: SimTime, neighbor: RouterId) -> Outcome<Message> {
        self.routers[at].on_link_failure(now, neighbor)
    }

    fn reroute(&mut self, topology: &Topology, anchors: &AnchorAssignment) {
        let rt = ramp_routes(topology, anchors, self.inconsistency);
        for r in &mut self.routers {
            if let Some(routes) = rt.router(r.id()) {
                r.install_routes(routes.clone());
            }
        }
    }

    fn housekeeping(&mut self, at: usize, now: SimTime) -> Outcome<Message> {
        self.routers[at].evict_idle(now);
        Outcome::default()
    }

    fn sizes(&self, at: usize) -> TableSizes {
        let s = self.routers[at].table_sizes();
        TableSizes {
            prt: s.prt,
            fab: s.fab,
            lsat: s.lsat,
            cs: s.cs,
            ..TableSizes::default()
        }
    }

    fn kind(msg: &Message) -> MsgKind {
        match msg {
            Message::Interest(_) => MsgKind::Interest,
            Message::Data(_) => MsgKind::Data,
            Message::Error(_) => MsgKind::Error,
        }
    }

    fn describe(msg: &Message, out: &mut String) {
        let _ = match msg {
            Message::Interest(i) => write!(
                out,
                " name={} aid={} anchor={} dist={}",
                i.name, i.aid, i.anchor, i.distance
            ),
            Message::Data(d) => write!(out, " name={} aid={}", d.name, d.aid),
            Message::Error(e) => write!(out, " aid={} code={}", e.aid, e.code),
        };
    }
}

pub struct NdnPlane {
    routers: Vec<NdnRouter>,
}

impl NdnPlane {
    pub fn new(topology: &Topology, anchors: &AnchorAssignment, config: &SimConfig) -> Self {
        let fibs = build_ndn_fibs(topology, anchors, hop_count);
        let nc = NdnConfig {
            pit_lifetime: config.pit_lifetime,
            cache_capacity: config.cache.capacity(),
            ..NdnConfig::default()
        };
        let routers = topology
            .routers()
            .iter()
            .map(|&id| NdnRouter::new(id, fibs[&id].clone(), anchors.prefixes_of(id), nc.clone()))
            .collect();
        Self { routers }
    }

    pub fn router(&self, at: usize) -> &NdnRouter {
        &self.routers[at]
    }
}

impl Plane for NdnPlane {
    type Msg = NdnMessage;

    fn consumer_interest(
        &mut self,
        at: usize,
        now: SimTime,
        consumer: ConsumerId,
        name: &Name,
        nonce: u32,
        tag: Option<TraceTag>,
    ) -> Outcome<NdnMessage> {
        let i = NdnInterest {
            name: name.clone(),
            nonce,
        };
        self.routers[at].on_interest(now, Ingress::Consumer(consumer), &i, tag)
    }

    fn receive(
        &mut self,
        at: usize,
        now: SimTime,
        from: RouterId,
        msg: &NdnMessage,
        tag: Option<TraceTag>,
    ) -> Outcome<NdnMessage> {
        let r = &mut self.routers[at];
        match msg {
            NdnMessage::Interest(i) => r.on_interest(now, Ingress::Neighbor(from), i, tag),
            NdnMessage::Data(d) => r.on_data(now, from, d, tag),
        }
    }

    fn link_failed(&mut self, _at: usize, _now: SimTime, _neighbor: RouterId) -> Outcome<NdnMessage> {
        // Pending entries toward the lost neighbor simply expire.
        Outcome::default()
    }

    fn reroute(&mut self, topology: &Topology, anchors: &AnchorAssignment) {
        let mut fibs = build_ndn_fibs(topology, anchors, hop_count);
        for r in &mut self.routers {
            if let Some(f) = fibs.remove(&r.id()) {
                r.install_fib(f);
            }
        }
    }

    fn housekeeping(&mut self, at: usize, now: SimTime) -> Outcome<NdnMessage> {
        self.routers[at].expire_pit(now)
    }

    fn sizes(&self, at: usize) -> TableSizes {
        let s = self.routers[at].table_sizes();
        TableSizes {
            fib: s.fib,
            pit: s.pit,
            cs: s.cs,
            ..TableSizes::default()
        }
    }

    fn kind(msg: &NdnMessage) -> MsgKind {
        match msg {
            NdnMessage::Interest(_) => MsgKind::Interest,
            NdnMessage::Data(_) => MsgKind::Data,
        }
    }

    fn describe(msg: &NdnMessage, out: &mut String) {
        let _ = match msg {
            NdnMessage::Interest(i) => write!(out, " name={} nonce={}", i.name, i.nonce),
            NdnMessage::Data(d) => write!(out, " name={}", d.name),
        };
    }
}
