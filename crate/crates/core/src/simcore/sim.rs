//! The event loop: consumers, links, routers and measurement.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::engine::EventQueue;
use super::link::LinkTable;
use super::metrics::{RunMetrics, TableAccumulator};
use super::plane::{MsgKind, NdnPlane, Plane, RampPlane};
use super::scenario::{ConsumerSpec, Mode, SimConfig};
use super::trace::{tag_str, Trace};
use super::workload::{Catalog, RequestStream, Zipf};
use crate::control_plane::{compute_routes, hop_count, AnchorAssignment, RouteTables, RouterId, Topology};
use crate::error::ConfigError;
use crate::forwarding::{ConsumerId, DropReason, Emission, LookupCounts, Outcome, TraceTag};
use crate::names::Name;
use crate::ramp_router::ErrorCode;
use crate::time::SimTime;

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub metrics: RunMetrics,
    pub trace: Option<String>,
    /// Routers hosting a consumer; consumer `i` sits at `consumers[i]`.
    pub consumers: Vec<RouterId>,
}

/// Routers that host consumers, in ascending order.
pub fn select_consumers(
    topology: &Topology,
    anchors: &AnchorAssignment,
    spec: &ConsumerSpec,
    seed: u64,
) -> Result<Vec<RouterId>, ConfigError> {
    let mut out = match spec {
        ConsumerSpec::Routers(r) => {
            if let Some(bad) = r.iter().find(|x| !topology.contains(**x)) {
                return Err(ConfigError::new("consumer_routers", format!("unknown router {bad}")));
            }
            let mut r = r.clone();
            r.sort();
            r.dedup();
            r
        }
        ConsumerSpec::Count(n) => {
            if *n > topology.router_count() {
                return Err(ConfigError::new(
                    "consumers",
                    format!("{n} consumers but only {} routers", topology.router_count()),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let is_anchor = |r: &RouterId| !anchors.prefixes_of(*r).is_empty();
            let mut plain: Vec<RouterId> = topology.routers().iter().copied().filter(|r| !is_anchor(r)).collect();
            let mut hosting: Vec<RouterId> = topology.routers().iter().copied().filter(is_anchor).collect();
            plain.shuffle(&mut rng);
            hosting.shuffle(&mut rng);
            plain.extend(hosting);
            plain.truncate(*n);
            plain
        }
    };
    out.sort();
    Ok(out)
}

/// Runs one simulation. Identical inputs give identical outputs.
pub fn run(topology: &Topology, anchors: &AnchorAssignment, config: &SimConfig) -> Result<RunOutput, ConfigError> {
    config.validate()?;
    anchors
        .validate(topology)
        .map_err(|e| ConfigError::new("anchors", e.to_string()))?;
    if anchors.prefix_count() == 0 {
        return Err(ConfigError::new("anchors", "no prefixes announced"));
    }
    for f in &config.link_failures {
        if topology.link_between(f.a, f.b).is_none() {
            return Err(ConfigError::new("link_failure", format!("no link {}-{}", f.a, f.b)));
        }
    }
    let consumers = select_consumers(topology, anchors, &config.consumers, config.seed)?;
    let (metrics, trace) = match config.mode {
        Mode::Ramp => Sim::new(topology, anchors, config, &consumers, RampPlane::new(topology, anchors, config)).run(),
        Mode::Ndn => Sim::new(topology, anchors, config, &consumers, NdnPlane::new(topology, anchors, config)).run(),
    };
    Ok(RunOutput {
        metrics,
        trace,
        consumers,
    })
}

enum Event<M> {
    Request(usize),
    Arrival {
        link: usize,
        from: RouterId,
        to: usize,
        msg: M,
        tag: Option<TraceTag>,
    },
    Timeout {
        consumer: usize,
        name: Name,
        attempt: u32,
        tag: TraceTag,
    },
    LinkFailure(usize),
    Sample,
}

struct Pending {
    issued: Vec<SimTime>,
    attempt: u32,
    /// Instance carrying the current attempt.
    tag: Option<TraceTag>,
}

struct Consumer {
    id: ConsumerId,
    at: usize,
    stream: RequestStream,
    /// Rank of the next scheduled request.
    next_rank: usize,
    pending: FxHashMap<Name, Pending>,
}

struct TagState {
    issued: SimTime,
    lookups: LookupCounts,
}

struct Sim<'a, P: Plane> {
    cfg: &'a SimConfig,
    anchors: &'a AnchorAssignment,
    topology: Topology,
    plane: P,
    queue: EventQueue<Event<P::Msg>>,
    links: LinkTable,
    consumers: Vec<Consumer>,
    catalog: Catalog,
    /// Names built so far, by catalog rank.
    names: FxHashMap<usize, Name>,
    zipf: Zipf,
    hop_routes: RouteTables,
    tags: FxHashMap<TraceTag, TagState>,
    next_tag: u64,
    nonce_rng: ChaCha8Rng,
    trace: Trace,
    tables: TableAccumulator,
    m: RunMetrics,
    warmup: SimTime,
}

impl<'a, P: Plane> Sim<'a, P> {
    fn new(
        topology: &Topology,
        anchors: &'a AnchorAssignment,
        cfg: &'a SimConfig,
        consumer_routers: &[RouterId],
        plane: P,
    ) -> Self {
        let hop_routes = compute_routes(topology, anchors, hop_count);
        let catalog = Catalog::new(hop_routes.index().prefixes().to_vec(), cfg.cos_per_prefix);
        let zipf = Zipf::new(catalog.len(), cfg.zipf_alpha);
        let consumers = consumer_routers
            .iter()
            .enumerate()
            .map(|(i, r)| Consumer {
                id: ConsumerId(i as u32),
                at: topology.index_of(*r).expect("validated consumer router"),
                stream: RequestStream::new(cfg.seed, i as u64, cfg.rate),
                next_rank: 0,
                pending: FxHashMap::default(),
            })
            .collect();
        let warmup = cfg.warmup();
        let mut m = RunMetrics::new(cfg.mode, cfg.rate, cfg.seed, cfg.horizon, warmup);
        m.routers = topology.router_count();
        m.consumers = consumer_routers.len();
        for r in topology.routers() {
            m.interests_sent.insert(*r, 0);
        }
        Self {
            cfg,
            anchors,
            topology: topology.clone(),
            plane,
            queue: EventQueue::new(),
            links: LinkTable::new(topology),
            consumers,
            catalog,
            names: FxHashMap::default(),
            zipf,
            hop_routes,
            tags: FxHashMap::default(),
            next_tag: 0,
            nonce_rng: ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6E6F_6E63_6573_0000),
            trace: Trace::new(cfg.trace),
            tables: TableAccumulator::default(),
            m,
            warmup,
        }
    }

    fn run(mut self) -> (RunMetrics, Option<String>) {
        let horizon = self.cfg.horizon;
        for c in 0..self.consumers.len() {
            let (gap, rank) = self.consumers[c].stream.next(&self.zipf);
            self.schedule_request(c, gap, rank);
        }
        let mut t = self.cfg.sample_interval;
        while t <= horizon {
            self.queue.schedule(t, Event::Sample);
            t += self.cfg.sample_interval;
        }
        for (i, f) in self.cfg.link_failures.iter().enumerate() {
            if f.at <= horizon {
                self.queue.schedule(f.at, Event::LinkFailure(i));
            }
        }
        while let Some(next) = self.queue.peek_time() {
            if next > horizon {
                break;
            }
            let (now, ev) = self.queue.pop().expect("peeked");
            self.m.events += 1;
            self.handle(now, ev);
        }
        self.finish(horizon);
        self.m.tables = self.tables.means();
        self.m.samples = self.tables.samples;
        (self.m, self.trace.into_text())
    }

    fn schedule_request(&mut self, c: usize, gap: SimTime, rank: usize) {
        let at = self.queue.now() + gap;
        if at <= self.cfg.horizon {
            self.consumers[c].next_rank = rank;
            self.queue.schedule(at, Event::Request(c));
        }
    }

    fn handle(&mut self, now: SimTime, ev: Event<P::Msg>) {
        match ev {
            Event::Request(c) => self.on_request(now, c),
            Event::Arrival {
                link,
                from,
                to,
                msg,
                tag,
            } => {
                if !self.links.get(link).up {
                    self.drop_tag(now, Some(self.router_id(to)), tag, DropReason::LinkDown);
                    return;
                }
                let out = self.plane.receive(to, now, from, &msg, tag);
                self.apply(now, to, out, tag);
            }
            Event::Timeout {
                consumer,
                name,
                attempt,
                tag,
            } => self.on_timeout(now, consumer, name, attempt, tag),
            Event::LinkFailure(i) => self.on_link_failure(now, i),
            Event::Sample => self.on_sample(now),
        }
    }

    fn router_id(&self, idx: usize) -> RouterId {
        self.topology.router_at(idx)
    }

    fn in_window(&self, t: SimTime) -> bool {
        t >= self.warmup
    }

    fn on_request(&mut self, now: SimTime, c: usize) {
        let rank = self.consumers[c].next_rank;
        let (gap, next_rank) = self.consumers[c].stream.next(&self.zipf);
        self.schedule_request(c, gap, next_rank);

        let catalog = &self.catalog;
        let name = self.names.entry(rank).or_insert_with(|| catalog.name_of(rank)).clone();
        if self.in_window(now) {
            self.m.requests += 1;
        }
        let cons = &mut self.consumers[c];
        if let Some(p) = cons.pending.get_mut(&name) {
            p.issued.push(now);
            let (id, at) = (cons.id, cons.at);
            let r = self.router_id(at);
            self.trace
                .line(now, "join", Some(r), format_args!("consumer={} name={}", id.0, name));
            return;
        }
        cons.pending.insert(
            name.clone(),
            Pending {
                issued: vec![now],
                attempt: 0,
                tag: None,
            },
        );
        if self.in_window(now) {
            let origin = self.router_id(self.consumers[c].at);
            if let Some(hops) = self.hop_distance(origin, &name) {
                self.m.path_hops_sum += hops as u64;
                self.m.path_hops_count += 1;
            }
        }
        self.transmit(now, c, name, 0);
    }

    fn hop_distance(&self, origin: RouterId, name: &Name) -> Option<u32> {
        let routes = self.hop_routes.router(origin)?;
        let (_, ranks) = routes.prt.resolve(name)?;
        match ranks.first() {
            Some(r) => Some(r.distance),
            // The origin anchors the prefix itself.
            None => self.anchors.prefixes_of(origin).iter().any(|p| p.matches(name)).then_some(0),
        }
    }

    fn transmit(&mut self, now: SimTime, c: usize, name: Name, attempt: u32) {
        let tag = TraceTag(self.next_tag);
        self.next_tag += 1;
        self.tags.insert(
            tag,
            TagState {
                issued: now,
                lookups: LookupCounts::default(),
            },
        );
        if let Some(p) = self.consumers[c].pending.get_mut(&name) {
            p.tag = Some(tag);
        }
        let nonce: u32 = self.nonce_rng.random();
        let (id, at) = (self.consumers[c].id, self.consumers[c].at);
        let r = self.router_id(at);
        self.trace.line(
            now,
            "request",
            Some(r),
            format_args!("tag={} consumer={} name={} attempt={}", tag, id.0, name, attempt),
        );
        self.queue.schedule(
            now + self.cfg.rto,
            Event::Timeout {
                consumer: c,
                name: name.clone(),
                attempt,
                tag,
            },
        );
        let out = self.plane.consumer_interest(at, now, id, &name, nonce, Some(tag));
        self.apply(now, at, out, Some(tag));
    }

    fn on_timeout(&mut self, now: SimTime, c: usize, name: Name, attempt: u32, tag: TraceTag) {
        let Some(p) = self.consumers[c].pending.get(&name) else { return };
        if p.tag != Some(tag) {
            return;
        }
        let (id, at) = (self.consumers[c].id, self.consumers[c].at);
        let r = self.router_id(at);
        self.m.timeouts += 1;
        self.trace.line(
            now,
            "timeout",
            Some(r),
            format_args!("consumer={} name={} attempt={}", id.0, name, attempt),
        );
        self.retry_or_fail(now, c, name);
    }

    fn retry_or_fail(&mut self, now: SimTime, c: usize, name: Name) {
        let max = self.cfg.max_retransmissions;
        let p = self.consumers[c].pending.get_mut(&name).expect("pending request");
        if p.attempt < max {
            p.attempt += 1;
            let attempt = p.attempt;
            self.m.retransmissions += 1;
            self.transmit(now, c, name, attempt);
        } else {
            let p = self.consumers[c].pending.remove(&name).expect("pending request");
            let (id, at) = (self.consumers[c].id, self.consumers[c].at);
            let r = self.router_id(at);
            self.m.failed += p.issued.iter().filter(|t| **t >= self.warmup).count() as u64;
            self.trace.line(
                now,
                "giveup",
                Some(r),
                format_args!("consumer={} name={} requests={}", id.0, name, p.issued.len()),
            );
        }
    }

    fn on_link_failure(&mut self, now: SimTime, i: usize) {
        let f = self.cfg.link_failures[i];
        let link = self.links.find(f.a, f.b).expect("validated link");
        if !self.links.get(link).up {
            return;
        }
        self.links.get_mut(link).up = false;
        self.trace.line(now, "linkdown", None, format_args!("a={} b={}", f.a, f.b));
        self.topology = self.topology.without_link(f.a, f.b).expect("link present");
        self.plane.reroute(&self.topology, self.anchors);
        self.hop_routes = compute_routes(&self.topology, self.anchors, hop_count);
        for (x, y) in [(f.a, f.b), (f.b, f.a)] {
            let at = self.topology.index_of(x).expect("router present");
            let out = self.plane.link_failed(at, now, y);
            self.apply(now, at, out, None);
        }
    }

    fn on_sample(&mut self, now: SimTime) {
        let window = self.in_window(now);
        if window {
            self.tables.samples += 1;
        }
        for at in 0..self.topology.router_count() {
            let out = self.plane.housekeeping(at, now);
            self.apply(now, at, out, None);
            if window {
                let r = self.router_id(at);
                self.tables.add(r, self.plane.sizes(at));
            }
        }
    }

    /// Closes an Interest instance. Returns whether it was a window instance.
    fn close_tag(&mut self, tag: Option<TraceTag>, delivered: bool) {
        let Some(tag) = tag else { return };
        let Some(st) = self.tags.remove(&tag) else { return };
        if st.issued >= self.warmup {
            self.m.lookups += st.lookups;
            if delivered {
                self.m.retrievals += 1;
            }
        }
    }

    fn drop_tag(&mut self, now: SimTime, at: Option<RouterId>, tag: Option<TraceTag>, reason: DropReason) {
        *self.m.drops.entry(reason.as_str().to_string()).or_default() += 1;
        self.trace
            .line(now, "drop", at, format_args!("tag={} reason={}", tag_str(tag), reason));
        self.close_tag(tag, false);
    }

    fn apply(&mut self, now: SimTime, at: usize, out: Outcome<P::Msg>, in_tag: Option<TraceTag>) {
        if let Some(st) = in_tag.and_then(|t| self.tags.get_mut(&t)) {
            st.lookups += out.lookups;
        }
        let here = self.router_id(at);
        for e in out.emissions {
            match e {
                Emission::Send { to, msg, tag } => self.send(now, here, to, msg, tag),
                Emission::Deliver { consumers, name, tag } => {
                    if self.trace.enabled() {
                        let ids: Vec<String> = consumers.iter().map(|c| c.0.to_string()).collect();
                        self.trace.line(
                            now,
                            "deliver",
                            Some(here),
                            format_args!("tag={} consumers={} name={}", tag_str(tag), ids.join(","), name),
                        );
                    }
                    self.close_tag(tag, true);
                    for c in consumers {
                        self.consumer_data(now, c, &name);
                    }
                }
                Emission::Notify { targets, code, tag } => {
                    *self.m.notifications.entry(code.as_str().to_string()).or_default() += 1;
                    if self.trace.enabled() {
                        let ids: Vec<String> = targets.iter().map(|(c, _)| c.0.to_string()).collect();
                        self.trace.line(
                            now,
                            "notify",
                            Some(here),
                            format_args!("tag={} code={} consumers={}", tag_str(tag), code, ids.join(",")),
                        );
                    }
                    self.close_tag(tag, false);
                    for (c, name) in targets {
                        self.consumer_error(now, c, name, code);
                    }
                }
                Emission::Drop { reason, tag } => self.drop_tag(now, Some(here), tag, reason),
            }
        }
    }

    fn send(&mut self, now: SimTime, here: RouterId, to: RouterId, msg: P::Msg, tag: Option<TraceTag>) {
        let kind = P::kind(&msg);
        let link = match self.links.find(here, to) {
            Some(l) if self.links.get(l).up => l,
            _ => {
                self.drop_tag(now, Some(here), tag, DropReason::LinkDown);
                return;
            }
        };
        if kind == MsgKind::Interest && self.in_window(now) {
            *self.m.interests_sent.entry(here).or_default() += 1;
        }
        if self.trace.enabled() {
            let mut detail = format!("tag={} to={}", tag_str(tag), to);
            P::describe(&msg, &mut detail);
            let k = match kind {
                MsgKind::Interest => "interest",
                MsgKind::Data => "data",
                MsgKind::Error => "error",
            };
            self.trace.line(now, k, Some(here), format_args!("{detail}"));
        }
        let bits = P::bytes(&self.cfg.packet_sizes, &msg) * 8;
        let arrival = self.links.get_mut(link).transmit(now, here, bits);
        let to_idx = self.topology.index_of(to).expect("neighbor is a router");
        self.queue.schedule(
            arrival,
            Event::Arrival {
                link,
                from: here,
                to: to_idx,
                msg,
                tag,
            },
        );
    }

    fn consumer_data(&mut self, now: SimTime, c: ConsumerId, name: &Name) {
        let c = c.0 as usize;
        let Some(p) = self.consumers[c].pending.remove(name) else { return };
        for t in &p.issued {
            if *t >= self.warmup {
                self.m.completed += 1;
                self.m.delays_ms.push((now - *t).as_millis_f64());
            }
        }
        if self.trace.enabled() {
            let r = self.router_id(self.consumers[c].at);
            let delay = (now - p.issued[0]).as_millis_f64();
            self.trace.line(
                now,
                "complete",
                Some(r),
                format_args!(
                    "consumer={} name={} requests={} delay_ms={:.6}",
                    c,
                    name,
                    p.issued.len(),
                    delay
                ),
            );
        }
    }

    fn consumer_error(&mut self, now: SimTime, c: ConsumerId, name: Name, code: ErrorCode) {
        let c = c.0 as usize;
        if !self.consumers[c].pending.contains_key(&name) {
            return;
        }
        if code.is_terminal() {
            let p = self.consumers[c].pending.get_mut(&name).expect("pending request");
            p.attempt = self.cfg.max_retransmissions;
        }
        self.retry_or_fail(now, c, name);
    }

    fn finish(&mut self, horizon: SimTime) {
        // Instances cut off by the horizon are censored from the lookup tally.
        let mut open: Vec<TraceTag> = self.tags.drain().map(|(t, _)| t).collect();
        open.sort();
        for t in open {
            self.drop_tag(horizon, None, Some(t), DropReason::Horizon);
        }
    }
}
