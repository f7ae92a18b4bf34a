//! Content-centric forwarding with anchor-bound Interests and per-hop
//! anonymous label swapping, a PIT/FIB baseline, and a deterministic
//! discrete-event simulator to compare the two.

pub mod content_store;
pub mod control_plane;
pub mod error;
pub mod forwarding;
pub mod names;
pub mod ndn_router;
pub mod ramp_router;
pub mod simcore;
pub mod time;

pub use control_plane::{Distance, RouterId};
pub use names::{Name, NamePrefix};
pub use time::SimTime;
