use thiserror::Error;

use crate::control_plane::RouterId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("malformed name: empty input")]
    Empty,
    #[error("malformed name {0:?}: missing leading '/'")]
    MissingLeadingSeparator(String),
    #[error("malformed name {text:?}: empty component at position {position}")]
    EmptyComponent { text: String, position: usize },
    #[error("malformed name: component {0:?} contains '/'")]
    SeparatorInComponent(String),
}

/// Problems found while reading topology, anchor or scenario text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("line {line}: {source}")]
    Name {
        line: usize,
        #[source]
        source: NameError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("self-link at router {0}")]
    SelfLink(RouterId),
    #[error("duplicate link {0}-{1}")]
    DuplicateLink(RouterId, RouterId),
    #[error("duplicate router {0}")]
    DuplicateRouter(RouterId),
    #[error("unknown router {0}")]
    UnknownRouter(RouterId),
    #[error("link {0}-{1} has non-positive rate")]
    ZeroRate(RouterId, RouterId),
    #[error("no link between {0} and {1}")]
    NoSuchLink(RouterId, RouterId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnchorError {
    #[error("anchor {0} is not a router of the topology")]
    UnknownAnchor(RouterId),
    #[error("anchor {anchor} announces {prefix} more than once")]
    DuplicateAnnouncement { anchor: RouterId, prefix: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("anonymous identifier space of {bits} bits exhausted")]
pub struct AidSpaceExhausted {
    pub bits: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config-invalid: {field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}
