//! Discrete-event simulation of both planes.

pub mod audit;
pub mod engine;
pub mod fuzz;
pub mod link;
pub mod metrics;
pub mod plane;
pub mod scenario;
pub mod sim;
pub mod trace;
pub mod workload;

pub use audit::{audit, AuditReport};
pub use fuzz::{loop_fuzz, FuzzOutcome, FuzzParams};
pub use metrics::{RunMetrics, TableKind, TableMeans, TableSizes};
pub use plane::{MsgKind, NdnPlane, Plane, RampPlane};
pub use scenario::{CacheMode, ConsumerSpec, Inconsistency, LinkFailure, Mode, PacketSizes, SimConfig};
pub use sim::{run, select_consumers, RunOutput};
pub use trace::{parse_line, parse_trace, Trace, TraceEvent};
pub use workload::{Catalog, RequestStream, Zipf};
