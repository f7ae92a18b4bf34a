//! Types shared by both forwarding planes: what a router hands back to the
//! event loop after processing one input.

use std::fmt;

use crate::control_plane::RouterId;
use crate::names::Name;
use crate::ramp_router::ErrorCode;

/// A local consumer application attached to some router.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConsumerId(pub u32);

impl fmt::Display for ConsumerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Simulator bookkeeping that follows one Interest instance (and the
/// reply it triggers) across hops. Never part of a wire message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceTag(pub u64);

impl fmt::Display for TraceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where an Interest entered a router.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ingress {
    Consumer(ConsumerId),
    Neighbor(RouterId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DropReason {
    /// Reply label matched no forwarding state.
    UnknownAid,
    /// No FIB entry for the name.
    NoRoute,
    DuplicateNonce,
    /// Data arrived with no pending entry for its name.
    NoPit,
    /// Data reached its origin after every waiting consumer was served.
    NoConsumer,
    /// Several Interests from the same downstream were answered by one copy.
    Merged,
    /// Data answering an Interest this router no longer waits on.
    Absorbed,
    PitExpired,
    LinkDown,
    AidSpaceExhausted,
    /// Still in flight when the run ended.
    Horizon,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::UnknownAid => "unknown-aid",
            DropReason::NoRoute => "no-route",
            DropReason::DuplicateNonce => "duplicate-nonce",
            DropReason::NoPit => "no-pit",
            DropReason::NoConsumer => "no-consumer",
            DropReason::Merged => "merged",
            DropReason::Absorbed => "absorbed",
            DropReason::PitExpired => "pit-expired",
            DropReason::LinkDown => "link-down",
            DropReason::AidSpaceExhausted => "aid-exhausted",
            DropReason::Horizon => "horizon",
        }
    }
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Table lookups performed while processing one input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LookupCounts {
    pub prt: u64,
    pub fab: u64,
    pub lsat: u64,
    pub fib: u64,
    pub pit: u64,
}

impl std::ops::AddAssign for LookupCounts {
    fn add_assign(&mut self, o: Self) {
        self.prt += o.prt;
        self.fab += o.fab;
        self.lsat += o.lsat;
        self.fib += o.fib;
        self.pit += o.pit;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Emission<M> {
    Send {
        to: RouterId,
        msg: M,
        tag: Option<TraceTag>,
    },
    /// Content handed to local consumers.
    Deliver {
        consumers: Vec<ConsumerId>,
        name: Name,
        tag: Option<TraceTag>,
    },
    /// Error handed to local consumers, one target per waiting request.
    Notify {
        targets: Vec<(ConsumerId, Name)>,
        code: ErrorCode,
        tag: Option<TraceTag>,
    },
    Drop {
        reason: DropReason,
        tag: Option<TraceTag>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<M> {
    pub emissions: Vec<Emission<M>>,
    pub lookups: LookupCounts,
}

impl<M> Default for Outcome<M> {
    fn default() -> Self {
        Self {
            emissions: Vec::new(),
            lookups: LookupCounts::default(),
        }
    }
}

impl<M> Outcome<M> {
    pub fn push(&mut self, e: Emission<M>) {
        self.emissions.push(e);
    }

    /// Messages sent to neighbors, in emission order.
    pub fn sent(&self) -> impl Iterator<Item = (RouterId, &M)> {
        self.emissions.iter().filter_map(|e| match e {
            Emission::Send { to, msg, .. } => Some((*to, msg)),
            _ => None,
        })
    }
}
