//! Analyzers comparing prefix-keyed and anchor-keyed forwarding.

use super::routes::{build_ndn_fibs, compute_routes, fib_walk};
use super::{AnchorAssignment, Distance, Link, RouterId, Topology};
use crate::error::AnalysisError;
use crate::names::NamePrefix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathComparison {
    pub origin: RouterId,
    pub prefix: NamePrefix,
    pub prefix_route: Option<Vec<RouterId>>,
    pub anchor_route: Option<Vec<RouterId>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathReport {
    /// (origin, prefix) pairs examined.
    pub compared: usize,
    pub single_anchor_pairs: usize,
    pub multi_homed_pairs: usize,
    /// Pairs where no route exists under either table style.
    pub unreachable: usize,
    /// Single-anchor pairs whose router sequences differ.
    pub divergences: Vec<PathComparison>,
    /// Multi-homed pairs whose route costs differ.
    pub length_mismatches: Vec<PathComparison>,
}

impl PathReport {
    pub fn is_clean(&self) -> bool {
        self.divergences.is_empty() && self.length_mismatches.is_empty()
    }
}

fn route_cost<F: Fn(&Link) -> Distance>(t: &Topology, route: &[RouterId], cost: &F) -> Option<Distance> {
    route
        .windows(2)
        .map(|w| t.link_between(w[0], w[1]).map(cost))
        .sum()
}

/// Walks every (origin, prefix) pair under per-prefix FIB forwarding and
/// under PRT binding + FAB forwarding, and reports where they disagree.
pub fn verify_path_equivalence<F: Fn(&Link) -> Distance>(
    t: &Topology,
    a: &AnchorAssignment,
    cost: F,
    origins: &[RouterId],
) -> PathReport {
    let tables = compute_routes(t, a, &cost);
    let fibs = build_ndn_fibs(t, a, &cost);
    let index = tables.index().clone();
    let mut report = PathReport::default();
    for &origin in origins {
        let Some(routes) = tables.router(origin) else {
            continue;
        };
        for (id, prefix) in index.prefixes().iter().enumerate() {
            report.compared += 1;
            let single = index.anchors(id).len() == 1;
            if single {
                report.single_anchor_pairs += 1;
            } else {
                report.multi_homed_pairs += 1;
            }
            let prefix_route = fib_walk(&fibs, origin, prefix);
            let anchor_route = routes
                .prt
                .get(prefix)
                .and_then(|ranks| ranks.first())
                .and_then(|bound| tables.fab_walk(origin, bound.anchor));
            if prefix_route.is_none() && anchor_route.is_none() {
                report.unreachable += 1;
                continue;
            }
            let cmp = || PathComparison {
                origin,
                prefix: prefix.clone(),
                prefix_route: prefix_route.clone(),
                anchor_route: anchor_route.clone(),
            };
            if single {
                if prefix_route != anchor_route {
                    report.divergences.push(cmp());
                }
            } else {
                let lp = prefix_route.as_deref().and_then(|r| route_cost(t, r, &cost));
                let la = anchor_route.as_deref().and_then(|r| route_cost(t, r, &cost));
                if lp.is_none() || lp != la {
                    report.length_mismatches.push(cmp());
                }
            }
        }
    }
    report
}

/// Which of the two conditions (if any) lets prefix routing beat anchor
/// routing after a failure next to the relay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdvantageVerdict {
    /// Neither condition holds.
    NoAdvantage,
    /// The relay still reaches the bound anchor, but another anchor is
    /// strictly closer: `D*(r,a_i) < inf && D(r,a_j) < D*(r,a_i)`.
    CloserAlternateAnchor,
    /// The relay lost the bound anchor and reaching the alternate anchor
    /// directly beats returning to the origin:
    /// `D*(r,a_i) = inf && D(r,a_j) < D(r,o) + D(o,a_j)`.
    AvoidsReturnToOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultihomingReport {
    pub verdict: AdvantageVerdict,
    /// Relay to bound anchor after the failure; `None` is infinite.
    pub relay_to_bound: Option<Distance>,
    /// Anchor of the prefix closest to the relay after the failure.
    pub alternate: Option<RouterId>,
    pub relay_to_alternate: Option<Distance>,
    pub relay_to_origin: Option<Distance>,
    pub origin_to_alternate: Option<Distance>,
}

fn shortest<F: Fn(&Link) -> Distance>(t: &Topology, from: RouterId, to: RouterId, cost: &F) -> Option<Distance> {
    let mut a = AnchorAssignment::new();
    let probe: NamePrefix = "/probe".parse().expect("well-formed");
    a.announce(to, probe).ok()?;
    let tables = compute_routes(t, &a, cost);
    tables.true_distance(from, to)
}

/// Evaluates the multi-homing advantage conditions on the topology after
/// `failed_link` is removed (`None` evaluates the intact topology).
#[allow(clippy::too_many_arguments)]
pub fn multihoming_advantage<F: Fn(&Link) -> Distance>(
    t: &Topology,
    a: &AnchorAssignment,
    cost: F,
    prefix: &NamePrefix,
    failed_link: Option<(RouterId, RouterId)>,
    origin: RouterId,
    relay: RouterId,
    bound_anchor: RouterId,
) -> Result<MultihomingReport, AnalysisError> {
    let invalid = |m: String| Err(AnalysisError::InvalidScenario(m));
    let by_prefix = a.anchors_by_prefix();
    let Some(anchors) = by_prefix.get(prefix) else {
        return invalid(format!("{prefix} has no anchor"));
    };
    if anchors.len() < 2 {
        return invalid(format!("{prefix} is not multi-homed"));
    }
    if !anchors.contains(&bound_anchor) {
        return invalid(format!("{bound_anchor} does not anchor {prefix}"));
    }
    let before = compute_routes(t, a, &cost);
    let Some(route) = before.fab_walk(origin, bound_anchor) else {
        return invalid(format!("no route from {origin} to {bound_anchor}"));
    };
    if !route.contains(&relay) {
        return invalid(format!("{relay} is not on the route {origin}->{bound_anchor}"));
    }
    let after = match failed_link {
        Some((x, y)) => {
            if x != relay && y != relay {
                return invalid(format!("failed link {x}-{y} is not incident to {relay}"));
            }
            t.without_link(x, y)
                .map_err(|e| AnalysisError::InvalidScenario(e.to_string()))?
        }
        None => t.clone(),
    };

    let relay_to_bound = shortest(&after, relay, bound_anchor, &cost);
    let alternate = anchors
        .iter()
        .filter_map(|an| shortest(&after, relay, *an, &cost).map(|d| (d, *an)))
        .min()
        .map(|(_, an)| an);
    let relay_to_alternate = alternate.and_then(|an| shortest(&after, relay, an, &cost));
    let relay_to_origin = shortest(&after, relay, origin, &cost);
    let origin_to_alternate = alternate.and_then(|an| shortest(&after, origin, an, &cost));

    let verdict = match (relay_to_bound, relay_to_alternate) {
        (Some(star), Some(alt)) if alt < star => AdvantageVerdict::CloserAlternateAnchor,
        (None, Some(alt)) => match (relay_to_origin, origin_to_alternate) {
            (Some(ro), Some(oa)) if alt < ro + oa => AdvantageVerdict::AvoidsReturnToOrigin,
            (None, _) | (_, None) => AdvantageVerdict::AvoidsReturnToOrigin,
            _ => AdvantageVerdict::NoAdvantage,
        },
        _ => AdvantageVerdict::NoAdvantage,
    };
    Ok(MultihomingReport {
        verdict,
        relay_to_bound,
        alternate,
        relay_to_alternate,
        relay_to_origin,
        origin_to_alternate,
    })
}
