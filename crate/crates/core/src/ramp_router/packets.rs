use std::fmt;

use bytes::Bytes;

use crate::control_plane::{Distance, RouterId};
use crate::names::Name;

/// Anonymous identifier: a hop-local label denoting an Interest's origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Aid(pub u32);

impl fmt::Display for Aid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Loop,
    NoRoute,
    NoContent,
    LinkFailure,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Loop => "loop",
            ErrorCode::NoRoute => "no-route",
            ErrorCode::NoContent => "no-content",
            ErrorCode::LinkFailure => "link-failure",
        }
    }

    /// Whether a consumer should give up rather than retransmit.
    pub fn is_terminal(self) -> bool {
        !matches!(self, ErrorCode::LinkFailure)
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "loop" => ErrorCode::Loop,
            "no-route" => ErrorCode::NoRoute,
            "no-content" => ErrorCode::NoContent,
            "link-failure" => ErrorCode::LinkFailure,
            _ => return None,
        })
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Interest as forwarded between routers: CO name, the sender's label for
/// the origin, the anchor bound by the origin, and the sender's distance
/// to that anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interest {
    pub name: Name,
    pub aid: Aid,
    pub anchor: RouterId,
    pub distance: Distance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataPacket {
    pub name: Name,
    /// Label the receiving router issued as its MAP.
    pub aid: Aid,
    pub payload: Bytes,
    /// Security payload, carried but not verified.
    pub sp: Bytes,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorMessage {
    pub name: Option<Name>,
    pub aid: Aid,
    pub anchor: Option<RouterId>,
    pub code: ErrorCode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Message {
    Interest(Interest),
    Data(DataPacket),
    Error(ErrorMessage),
}
