use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::routes::{NextHop, RouteTables};
use super::{Distance, RouterId};

/// Largest distance error introduced by the noise perturbations.
pub const MAX_DISTANCE_NOISE: i64 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Perturbation {
    /// Random neighbor, distance = neighbor's true distance + link cost.
    Reroute,
    /// Random neighbor, old distance plus noise.
    RerouteStale,
    /// Same next hop, old distance plus noise.
    StaleDistance,
}

fn noisy(d: Distance, rng: &mut ChaCha8Rng) -> Distance {
    let mut delta = 0;
    while delta == 0 {
        delta = rng.random_range(-MAX_DISTANCE_NOISE..=MAX_DISTANCE_NOISE);
    }
    (d as i64 + delta).max(1) as Distance
}

/// Perturbs roughly `severity` of all FAB entries, producing tables that
/// may disagree with each other and contain routing-table loops.
/// Deterministic in `seed`; `severity == 0` returns the tables unchanged.
pub fn inject_inconsistency(rt: &RouteTables, seed: u64, severity: f64) -> RouteTables {
    assert!((0.0..=1.0).contains(&severity), "severity must be in [0, 1]");
    let mut out = rt.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let router_ids: Vec<RouterId> = out.routers.keys().copied().collect();
    for router in router_ids {
        let neighbors = rt.neighbor_costs(router).to_vec();
        if neighbors.is_empty() {
            continue;
        }
        let routes = out.routers.get_mut(&router).expect("listed router");
        let entries: Vec<(RouterId, Vec<NextHop>)> =
            routes.fab.iter().map(|(a, hops)| (a, hops.to_vec())).collect();
        for (anchor, mut hops) in entries {
            if rng.random::<f64>() >= severity {
                continue;
            }
            let kind = match rng.random_range(0..3) {
                0 => Perturbation::Reroute,
                1 => Perturbation::RerouteStale,
                _ => Perturbation::StaleDistance,
            };
            let stale = hops[0].distance;
            let perturbed = match kind {
                Perturbation::StaleDistance => NextHop {
                    via: hops[0].via,
                    distance: noisy(stale, &mut rng),
                },
                Perturbation::Reroute | Perturbation::RerouteStale => {
                    let (via, link) = neighbors[rng.random_range(0..neighbors.len())];
                    let distance = match kind {
                        Perturbation::Reroute => match rt.true_distance(via, anchor) {
                            Some(d) => d + link,
                            None => noisy(stale, &mut rng),
                        },
                        _ => noisy(stale, &mut rng),
                    };
                    NextHop { via, distance }
                }
            };
            hops.retain(|h| h.via != perturbed.via);
            hops.push(perturbed);
            // Ranks stay best-first by stated distance, lower id on ties.
            hops.sort_by_key(|h| (h.distance, h.via));
            routes.fab.set(anchor, hops);
        }
    }
    out
}
