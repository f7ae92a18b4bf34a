//! Run configuration and its TOML form.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::control_plane::RouterId;
use crate::error::ConfigError;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Ramp,
    Ndn,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Ramp => "ramp",
            Mode::Ndn => "ndn",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ramp" => Ok(Mode::Ramp),
            "ndn" => Ok(Mode::Ndn),
            _ => Err(ConfigError::new("mode", format!("expected ramp or ndn, got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheMode {
    None,
    Lru(usize),
}

impl CacheMode {
    pub fn capacity(self) -> Option<usize> {
        match self {
            CacheMode::None => None,
            CacheMode::Lru(n) => Some(n),
        }
    }
}

impl fmt::Display for CacheMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheMode::None => f.write_str("none"),
            CacheMode::Lru(n) => write!(f, "lru:{n}"),
        }
    }
}

impl FromStr for CacheMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(CacheMode::None);
        }
        s.strip_prefix("lru:")
            .and_then(|n| n.parse().ok())
            .map(CacheMode::Lru)
            .ok_or_else(|| ConfigError::new("cache", format!("expected none or lru:N, got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConsumerSpec {
    /// This many routers drawn at random, anchors last.
    Count(usize),
    Routers(Vec<RouterId>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkFailure {
    pub at: SimTime,
    pub a: RouterId,
    pub b: RouterId,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Inconsistency {
    pub severity: f64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PacketSizes {
    pub interest: u64,
    pub data: u64,
    pub error: u64,
}

impl Default for PacketSizes {
    fn default() -> Self {
        Self {
            interest: 64,
            data: 1064,
            error: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub consumers: ConsumerSpec,
    /// Requests per second issued by each consumer.
    pub rate: f64,
    pub zipf_alpha: f64,
    pub cos_per_prefix: usize,
    pub horizon: SimTime,
    pub warmup_fraction: f64,
    pub sample_interval: SimTime,
    pub rto: SimTime,
    pub max_retransmissions: u32,
    pub pit_lifetime: SimTime,
    pub lsat_ttl: SimTime,
    pub cache: CacheMode,
    pub seed: u64,
    pub aid_bits: u8,
    pub packet_sizes: PacketSizes,
    pub link_failures: Vec<LinkFailure>,
    pub inconsistency: Option<Inconsistency>,
    pub trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Ramp,
            consumers: ConsumerSpec::Count(70),
            rate: 100.0,
            zipf_alpha: 0.7,
            cos_per_prefix: 10,
            horizon: SimTime::from_secs(30),
            warmup_fraction: 0.1,
            sample_interval: SimTime::from_millis(100),
            rto: SimTime::from_secs(1),
            max_retransmissions: 3,
            pit_lifetime: SimTime::from_secs(2),
            lsat_ttl: SimTime::from_secs(10),
            cache: CacheMode::None,
            seed: 1,
            aid_bits: 32,
            packet_sizes: PacketSizes::default(),
            link_failures: Vec::new(),
            inconsistency: None,
            trace: false,
        }
    }
}

impl SimConfig {
    pub fn warmup(&self) -> SimTime {
        SimTime::from_secs_f64(self.horizon.as_secs_f64() * self.warmup_fraction)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(field, format!("must be positive, got {v}")))
            }
        };
        positive("rate", self.rate)?;
        if !(self.zipf_alpha.is_finite() && self.zipf_alpha >= 0.0) {
            return Err(ConfigError::new("zipf_alpha", "must be a non-negative number"));
        }
        if self.cos_per_prefix == 0 {
            return Err(ConfigError::new("cos_per_prefix", "must be at least 1"));
        }
        for (field, t) in [
            ("horizon_s", self.horizon),
            ("sample_interval_ms", self.sample_interval),
            ("rto_ms", self.rto),
            ("pit_lifetime_ms", self.pit_lifetime),
            ("lsat_ttl_ms", self.lsat_ttl),
        ] {
            if t == SimTime::ZERO {
                return Err(ConfigError::new(field, "must be positive"));
            }
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return Err(ConfigError::new("warmup_fraction", "must lie in [0, 1)"));
        }
        if !(1..=32).contains(&self.aid_bits) {
            return Err(ConfigError::new("aid_bits", "must lie in 1..=32"));
        }
        if let ConsumerSpec::Count(0) = self.consumers {
            return Err(ConfigError::new("consumers", "must be at least 1"));
        }
        if let ConsumerSpec::Routers(r) = &self.consumers {
            if r.is_empty() {
                return Err(ConfigError::new("consumer_routers", "must not be empty"));
            }
        }
        if let Some(i) = self.inconsistency {
            if !(0.0..=1.0).contains(&i.severity) {
                return Err(ConfigError::new("inconsistency.severity", "must lie in [0, 1]"));
            }
        }
        let s = self.packet_sizes;
        if s.interest == 0 || s.data == 0 || s.error == 0 {
            return Err(ConfigError::new("packet sizes", "must be positive"));
        }
        Ok(())
    }

    /// Reads a scenario file. Absent keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<SimConfig, ConfigError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| ConfigError::new("toml", e.message().to_string()))?;
        raw.apply(SimConfig::default())
    }

    /// TOML rendering that `from_toml` reads back to an equal config.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let ms = |t: SimTime| t.as_millis_f64();
        s.push_str(&format!("mode = \"{}\"\n", self.mode));
        match &self.consumers {
            ConsumerSpec::Count(n) => s.push_str(&format!("consumers = {n}\n")),
            ConsumerSpec::Routers(r) => {
                let ids: Vec<String> = r.iter().map(|x| x.0.to_string()).collect();
                s.push_str(&format!("consumer_routers = [{}]\n", ids.join(", ")));
            }
        }
        s.push_str(&format!("rate = {:?}\n", self.rate));
        s.push_str(&format!("zipf_alpha = {:?}\n", self.zipf_alpha));
        s.push_str(&format!("cos_per_prefix = {}\n", self.cos_per_prefix));
        s.push_str(&format!("horizon_s = {:?}\n", self.horizon.as_secs_f64()));
        s.push_str(&format!("warmup_fraction = {:?}\n", self.warmup_fraction));
        s.push_str(&format!("sample_interval_ms = {:?}\n", ms(self.sample_interval)));
        s.push_str(&format!("rto_ms = {:?}\n", ms(self.rto)));
        s.push_str(&format!("max_retransmissions = {}\n", self.max_retransmissions));
        s.push_str(&format!("pit_lifetime_ms = {:?}\n", ms(self.pit_lifetime)));
        s.push_str(&format!("lsat_ttl_ms = {:?}\n", ms(self.lsat_ttl)));
        s.push_str(&format!("cache = \"{}\"\n", self.cache));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("aid_bits = {}\n", self.aid_bits));
        s.push_str(&format!("interest_bytes = {}\n", self.packet_sizes.interest));
        s.push_str(&format!("data_bytes = {}\n", self.packet_sizes.data));
        s.push_str(&format!("error_bytes = {}\n", self.packet_sizes.error));
        s.push_str(&format!("trace = {}\n", self.trace));
        if let Some(i) = self.inconsistency {
            s.push_str(&format!("\n[inconsistency]\nseverity = {:?}\nseed = {}\n", i.severity, i.seed));
        }
        for f in &self.link_failures {
            s.push_str(&format!(
                "\n[[link_failure]]\nat_s = {:?}\na = {}\nb = {}\n",
                f.at.as_secs_f64(),
                f.a.0,
                f.b.0
            ));
        }
        s
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    mode: Option<String>,
    consumers: Option<usize>,
    consumer_routers: Option<Vec<u32>>,
    rate: Option<f64>,
    zipf_alpha: Option<f64>,
    cos_per_prefix: Option<usize>,
    horizon_s: Option<f64>,
    warmup_fraction: Option<f64>,
    sample_interval_ms: Option<f64>,
    rto_ms: Option<f64>,
    max_retransmissions: Option<u32>,
    pit_lifetime_ms: Option<f64>,
    lsat_ttl_ms: Option<f64>,
    cache: Option<String>,
    seed: Option<u64>,
    aid_bits: Option<u8>,
    interest_bytes: Option<u64>,
    data_bytes: Option<u64>,
    error_bytes: Option<u64>,
    trace: Option<bool>,
    inconsistency: Option<RawInconsistency>,
    #[serde(default)]
    link_failure: Vec<RawLinkFailure>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInconsistency {
    severity: f64,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinkFailure {
    at_s: f64,
    a: u32,
    b: u32,
}

fn duration(field: &str, v: f64, unit: f64) -> Result<SimTime, ConfigError> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(ConfigError::new(field, format!("must be a non-negative number, got {v}")));
    }
    Ok(SimTime::from_secs_f64(v * unit))
}

impl RawScenario {
    fn apply(self, mut c: SimConfig) -> Result<SimConfig, ConfigError> {
        if let Some(m) = self.mode {
            c.mode = m.parse()?;
        }
        match (self.consumers, self.consumer_routers) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new("consumers", "give either consumers or consumer_routers"));
            }
            (Some(n), None) => c.consumers = ConsumerSpec::Count(n),
            (None, Some(r)) => c.consumers = ConsumerSpec::Routers(r.into_iter().map(RouterId).collect()),
            (None, None) => {}
        }
        if let Some(v) = self.rate {
            c.rate = v;
        }
        if let Some(v) = self.zipf_alpha {
            c.zipf_alpha = v;
        }
        if let Some(v) = self.cos_per_prefix {
            c.cos_per_prefix = v;
        }
        if let Some(v) = self.horizon_s {
            c.horizon = duration("horizon_s", v, 1.0)?;
        }
        if let Some(v) = self.warmup_fraction {
            c.warmup_fraction = v;
        }
        if let Some(v) = self.sample_interval_ms {
            c.sample_interval = duration("sample_interval_ms", v, 1e-3)?;
        }
        if let Some(v) = self.rto_ms {
            c.rto = duration("rto_ms", v, 1e-3)?;
        }
        if let Some(v) = self.max_retransmissions {
            c.max_retransmissions = v;
        }
        if let Some(v) = self.pit_lifetime_ms {
            c.pit_lifetime = duration("pit_lifetime_ms", v, 1e-3)?;
        }
        if let Some(v) = self.lsat_ttl_ms {
            c.lsat_ttl = duration("lsat_ttl_ms", v, 1e-3)?;
        }
        if let Some(v) = self.cache {
            c.cache = v.parse()?;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.aid_bits {
            c.aid_bits = v;
        }
        if let Some(v) = self.interest_bytes {
            c.packet_sizes.interest = v;
        }
        if let Some(v) = self.data_bytes {
            c.packet_sizes.data = v;
        }
        if let Some(v) = self.error_bytes {
            c.packet_sizes.error = v;
        }
        if let Some(v) = self.trace {
            c.trace = v;
        }
        if let Some(i) = self.inconsistency {
            c.inconsistency = Some(Inconsistency {
                severity: i.severity,
                seed: i.seed,
            });
        }
        for f in self.link_failure {
            c.link_failures.push(LinkFailure {
                at: duration("link_failure.at_s", f.at_s, 1.0)?,
                a: RouterId(f.a),
                b: RouterId(f.b),
            });
        }
        c.validate()?;
        Ok(c)
    }
}
