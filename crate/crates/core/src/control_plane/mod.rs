//! Topology, anchor bindings and centralized route computation.
//!
//! Tables are immutable snapshots once built; routers receive clones of
//! their own slice.

mod analysis;
mod anchors;
mod inconsistency;
mod routes;
mod topology;

pub use analysis::{
    multihoming_advantage, verify_path_equivalence, AdvantageVerdict, MultihomingReport, PathComparison, PathReport,
};
pub use anchors::AnchorAssignment;
pub use inconsistency::{inject_inconsistency, MAX_DISTANCE_NOISE};
pub use routes::{
    build_ndn_fibs, compute_routes, fib_walk, AnchorRank, AnchorSetId, Fab, NdnFib, NdnFibs, NextHop, PrefixId,
    PrefixIndex, Prt, RouteTables, RouterRoutes,
};
pub use topology::{hop_count, Distance, Link, RouterId, Topology};
