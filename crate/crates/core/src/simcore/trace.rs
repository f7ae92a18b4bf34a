//! Line-oriented event log.
//!
//! Grammar, one event per line:
//!
//! ```text
//! line   := time SP kind SP router (SP key "=" value)*
//! time   := seconds "." 12 digits
//! router := decimal id | "-"
//! ```
//!
//! Kinds and their keys:
//!
//! | kind       | router   | keys                                             |
//! |------------|----------|--------------------------------------------------|
//! | request    | origin   | tag consumer name attempt                        |
//! | join       | origin   | consumer name                                    |
//! | interest   | sender   | tag to name, then aid anchor dist or nonce       |
//! | data       | sender   | tag to name, then aid                            |
//! | error      | sender   | tag to aid code                                  |
//! | deliver    | origin   | tag consumers name                               |
//! | notify     | origin   | tag code consumers                               |
//! | drop       | router   | tag reason                                       |
//! | linkdown   | -        | a b                                              |
//! | complete   | origin   | consumer name requests delay_ms                  |
//! | timeout    | origin   | consumer name attempt                            |
//! | giveup     | origin   | consumer name requests                           |
//!
//! `tag` is `-` for messages not caused by an Interest instance.

use std::fmt::{self, Write};

use crate::control_plane::RouterId;
use crate::forwarding::TraceTag;
use crate::time::{SimTime, PICOS_PER_SECOND};

/// Collects trace lines when enabled; otherwise every call is a no-op.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    buf: Option<String>,
}

pub fn tag_str(tag: Option<TraceTag>) -> String {
    tag.map_or_else(|| "-".to_string(), |t| t.to_string())
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Self {
            buf: enabled.then(String::new),
        }
    }

    pub fn enabled(&self) -> bool {
        self.buf.is_some()
    }

    pub fn line(&mut self, time: SimTime, kind: &str, router: Option<RouterId>, detail: fmt::Arguments<'_>) {
        if let Some(buf) = &mut self.buf {
            match router {
                Some(r) => write!(buf, "{time} {kind} {r}"),
                None => write!(buf, "{time} {kind} -"),
            }
            .expect("writing to a String");
            buf.push(' ');
            buf.write_fmt(detail).expect("writing to a String");
            buf.push('\n');
        }
    }

    pub fn into_text(self) -> Option<String> {
        self.buf
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: SimTime,
    pub kind: String,
    pub router: Option<RouterId>,
    pub fields: Vec<(String, String)>,
}

impl TraceEvent {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn tag(&self) -> Option<TraceTag> {
        self.get("tag").and_then(|v| v.parse().ok()).map(TraceTag)
    }

    pub fn num(&self, key: &str) -> Option<u64> {
        self.get(key).and_then(|v| v.parse().ok())
    }
}

fn parse_time(s: &str) -> Option<SimTime> {
    let (secs, frac) = s.split_once('.')?;
    if frac.len() != 12 {
        return None;
    }
    let secs: u64 = secs.parse().ok()?;
    let frac: u64 = frac.parse().ok()?;
    Some(SimTime(secs * PICOS_PER_SECOND + frac))
}

pub fn parse_line(line: &str) -> Result<TraceEvent, String> {
    let mut parts = line.split(' ');
    let time = parts
        .next()
        .and_then(parse_time)
        .ok_or_else(|| format!("bad time in {line:?}"))?;
    let kind = parts.next().ok_or_else(|| format!("missing kind in {line:?}"))?.to_string();
    let router = match parts.next() {
        Some("-") => None,
        Some(r) => Some(RouterId(r.parse().map_err(|_| format!("bad router in {line:?}"))?)),
        None => return Err(format!("missing router in {line:?}")),
    };
    let mut fields = Vec::new();
    for p in parts.filter(|p| !p.is_empty()) {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("bad field {p:?}"))?;
        fields.push((k.to_string(), v.to_string()));
    }
    Ok(TraceEvent {
        time,
        kind,
        router,
        fields,
    })
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, String> {
    text.lines().filter(|l| !l.is_empty()).map(parse_line).collect()
}
