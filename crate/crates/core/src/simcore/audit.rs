//! Invariant checks over a parsed trace, independent of the simulator's
//! internal bookkeeping.

use std::collections::{BTreeMap, HashSet};

use super::trace::TraceEvent;
use crate::control_plane::RouterId;
use crate::forwarding::TraceTag;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub instances: usize,
    /// Hops where the stated distance did not strictly decrease.
    pub distance_violations: usize,
    /// Instances forwarded twice by the same router. Arriving at a router
    /// already on the path and being refused there is detection, not a loop.
    pub revisits: usize,
    /// Hops that skip a router or start away from the previous receiver.
    pub discontinuities: usize,
    /// Replies not following the exact reverse of the Interest path.
    pub reverse_path_violations: usize,
    /// Instances without exactly one terminal event.
    pub conservation_violations: usize,
    /// Labels equal to the origin router id or a consumer id.
    pub anonymity_violations: usize,
    pub delivered: usize,
    /// Distinct instances answered with a loop error.
    pub loop_errors: usize,
    pub first_problem: Option<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.distance_violations == 0
            && self.revisits == 0
            && self.discontinuities == 0
            && self.reverse_path_violations == 0
            && self.conservation_violations == 0
            && self.anonymity_violations == 0
    }

    fn note(&mut self, msg: impl FnOnce() -> String) {
        if self.first_problem.is_none() {
            self.first_problem = Some(msg());
        }
    }
}

#[derive(Default)]
struct Instance {
    origin: Option<RouterId>,
    consumer: Option<u64>,
    /// Router sequence of the Interest: origin, then each receiver.
    forward: Vec<RouterId>,
    /// Routers that sent the Interest on.
    senders: Vec<RouterId>,
    last_dist: Option<u64>,
    /// Router sequence of the reply, starting at the replier.
    reverse: Vec<RouterId>,
    terminals: usize,
    delivered_at: Option<RouterId>,
    loop_error: bool,
}

pub fn audit(events: &[TraceEvent]) -> AuditReport {
    let mut rep = AuditReport::default();
    let mut inst: BTreeMap<TraceTag, Instance> = BTreeMap::new();

    for ev in events {
        let Some(tag) = ev.tag() else { continue };
        let i = inst.entry(tag).or_default();
        let here = ev.router;
        match ev.kind.as_str() {
            "request" => {
                i.origin = here;
                i.consumer = ev.num("consumer");
                i.forward.extend(here);
            }
            "interest" => {
                let to = ev.num("to").map(|v| RouterId(v as u32));
                if here != i.forward.last().copied() || !i.reverse.is_empty() {
                    rep.discontinuities += 1;
                    rep.note(|| format!("tag {tag}: interest leaves {here:?} off its path"));
                }
                if let Some(d) = ev.num("dist") {
                    if i.last_dist.is_some_and(|prev| d >= prev) {
                        rep.distance_violations += 1;
                        rep.note(|| format!("tag {tag}: distance {d} after {:?}", i.last_dist));
                    }
                    i.last_dist = Some(d);
                }
                if let Some(aid) = ev.num("aid") {
                    if i.origin.is_some_and(|o| o.0 as u64 == aid) || i.consumer == Some(aid) {
                        rep.anonymity_violations += 1;
                        rep.note(|| format!("tag {tag}: label {aid} names its origin"));
                    }
                }
                if let Some(h) = here {
                    if i.senders.contains(&h) {
                        rep.revisits += 1;
                        rep.note(|| format!("tag {tag}: router {h} forwards it twice"));
                    }
                    i.senders.push(h);
                }
                i.forward.extend(to);
            }
            "data" | "error" => {
                if ev.kind == "error" && ev.get("code") == Some("loop") {
                    i.loop_error = true;
                }
                if ev.kind == "data" {
                    if let Some(aid) = ev.num("aid") {
                        if i.origin.is_some_and(|o| o.0 as u64 == aid) || i.consumer == Some(aid) {
                            rep.anonymity_violations += 1;
                            rep.note(|| format!("tag {tag}: reply label {aid} names its origin"));
                        }
                    }
                }
                if i.reverse.is_empty() {
                    i.reverse.extend(here);
                } else if here != i.reverse.last().copied() {
                    rep.discontinuities += 1;
                    rep.note(|| format!("tag {tag}: reply leaves {here:?} off its path"));
                }
                if let Some(to) = ev.num("to") {
                    i.reverse.push(RouterId(to as u32));
                }
            }
            "deliver" => {
                i.terminals += 1;
                i.delivered_at = here;
                if i.reverse.is_empty() {
                    i.reverse.extend(here);
                }
            }
            "notify" => {
                i.terminals += 1;
                if ev.get("code") == Some("loop") {
                    i.loop_error = true;
                }
                if i.reverse.is_empty() {
                    i.reverse.extend(here);
                }
            }
            "drop" => i.terminals += 1,
            _ => {}
        }
    }

    for (tag, i) in &inst {
        rep.instances += 1;
        if i.origin.is_none() || i.terminals != 1 {
            rep.conservation_violations += 1;
            rep.note(|| format!("tag {tag}: {} terminal events, origin {:?}", i.terminals, i.origin));
        }
        if i.loop_error {
            rep.loop_errors += 1;
        }
        if !i.reverse.is_empty() {
            // The reply retraces a suffix of the forward path, replier first.
            let fwd = &i.forward;
            let ok = match fwd.iter().rposition(|r| Some(r) == i.reverse.first()) {
                Some(end) => {
                    let expected: Vec<RouterId> = fwd[..=end].iter().rev().copied().collect();
                    expected.starts_with(&i.reverse) && end + 1 == fwd.len()
                }
                None => false,
            };
            if !ok {
                rep.reverse_path_violations += 1;
                rep.note(|| format!("tag {tag}: forward {fwd:?}, reverse {:?}", i.reverse));
            }
        }
        if let Some(at) = i.delivered_at {
            rep.delivered += 1;
            let complete = i.reverse.last() == Some(&at) && Some(at) == i.origin && i.reverse.len() == i.forward.len();
            if !complete {
                rep.reverse_path_violations += 1;
                rep.note(|| format!("tag {tag}: delivered at {at} after reverse {:?}", i.reverse));
            }
        }
    }
    rep
}

/// Routers visited by each instance's Interest, for inspection.
pub fn forward_paths(events: &[TraceEvent]) -> BTreeMap<TraceTag, Vec<RouterId>> {
    let mut out: BTreeMap<TraceTag, Vec<RouterId>> = BTreeMap::new();
    for ev in events {
        let Some(tag) = ev.tag() else { continue };
        match ev.kind.as_str() {
            "request" => out.entry(tag).or_default().extend(ev.router),
            "interest" => {
                if let Some(to) = ev.num("to") {
                    out.entry(tag).or_default().push(RouterId(to as u32));
                }
            }
            _ => {}
        }
    }
    out
}

/// Tags seen in the trace.
pub fn tags(events: &[TraceEvent]) -> HashSet<TraceTag> {
    events.iter().filter_map(TraceEvent::tag).collect()
}

#[cfg(test)]
mod tests {
    use super::super::trace::parse_trace;
    use super::*;

    const GOOD: &str = "\
0.000000000000 request 0 tag=1 consumer=0 name=/a/o1 attempt=0
0.000000000000 interest 0 tag=1 to=1 name=/a/o1 aid=70000 anchor=2 dist=2
0.001000000000 interest 1 tag=1 to=2 name=/a/o1 aid=70001 anchor=2 dist=1
0.002000000000 data 2 tag=1 to=1 name=/a/o1 aid=70001
0.003000000000 data 1 tag=1 to=0 name=/a/o1 aid=70000
0.004000000000 deliver 0 tag=1 consumers=0 name=/a/o1
";

    #[test]
    fn clean_trace_passes() {
        let r = audit(&parse_trace(GOOD).unwrap());
        assert!(r.is_clean(), "{r:?}");
        assert_eq!((r.instances, r.delivered), (1, 1));
    }

    #[test]
    fn detects_non_decreasing_distance() {
        let bad = GOOD.replace("aid=70001 anchor=2 dist=1", "aid=70001 anchor=2 dist=2");
        let r = audit(&parse_trace(&bad).unwrap());
        assert_eq!(r.distance_violations, 1);
        assert_eq!(r.revisits, 0);
    }

    #[test]
    fn refused_return_is_not_a_revisit_but_forwarding_again_is() {
        let refused = "\
0.000000000000 request 0 tag=1 consumer=0 name=/a/o1 attempt=0
0.000000000000 interest 0 tag=1 to=1 name=/a/o1 aid=70000 anchor=2 dist=3
0.001000000000 interest 1 tag=1 to=0 name=/a/o1 aid=70001 anchor=2 dist=2
0.002000000000 error 0 tag=1 to=1 aid=70001 code=loop
0.003000000000 error 1 tag=1 to=0 aid=70000 code=loop
0.004000000000 notify 0 tag=1 code=loop consumers=0
";
        let r = audit(&parse_trace(refused).unwrap());
        assert!(r.is_clean(), "{r:?}");
        assert_eq!(r.loop_errors, 1);

        let looped = "\
0.000000000000 request 0 tag=1 consumer=0 name=/a/o1 attempt=0
0.000000000000 interest 0 tag=1 to=1 name=/a/o1 aid=70000 anchor=2 dist=3
0.001000000000 interest 1 tag=1 to=0 name=/a/o1 aid=70001 anchor=2 dist=2
0.002000000000 interest 0 tag=1 to=2 name=/a/o1 aid=70002 anchor=2 dist=1
0.003000000000 drop 2 tag=1 reason=horizon
";
        assert_eq!(audit(&parse_trace(looped).unwrap()).revisits, 1);
    }

    #[test]
    fn detects_missing_and_double_terminals() {
        let missing = GOOD.lines().take(5).collect::<Vec<_>>().join("\n");
        assert_eq!(audit(&parse_trace(&missing).unwrap()).conservation_violations, 1);
        let double = format!("{GOOD}0.005000000000 drop 0 tag=1 reason=horizon\n");
        assert_eq!(audit(&parse_trace(&double).unwrap()).conservation_violations, 1);
    }

    #[test]
    fn detects_wrong_reverse_path_and_exposed_origin() {
        let bad = GOOD.replace("data 1 tag=1 to=0", "data 1 tag=1 to=3");
        assert!(audit(&parse_trace(&bad).unwrap()).reverse_path_violations > 0);
        let exposed = GOOD.replace("aid=70000 anchor", "aid=0 anchor");
        assert_eq!(audit(&parse_trace(&exposed).unwrap()).anonymity_violations, 1);
    }
}
