//! Anchor-bound, label-swapping forwarding plane.

mod lrt;
mod lsat;
mod packets;
mod router;

pub use lrt::{Lrt, LrtEntry};
pub use lsat::{AidSpace, Lsat, LsatEntry, PrevHop};
pub use packets::{Aid, DataPacket, ErrorCode, ErrorMessage, Interest, Message};
pub use router::{alf_condition, RampConfig, RampRouter, RampTableSizes};
