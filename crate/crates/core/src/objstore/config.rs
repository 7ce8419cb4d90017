use std::path::Path;

use uuid::Uuid;

use crate::error::{Error, Result};

/// Pool geometry and cost-model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolConfig {
    pub uuid: Uuid,
    pub n_targets: usize,
    /// Per-operation service latency of one target, in simulated seconds.
    pub latency_secs: f64,
    /// Sustained bandwidth of one target, in bytes per simulated second.
    pub bandwidth_bytes_per_sec: f64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self {
            uuid: Uuid::nil(),
            n_targets: 8,
            latency_secs: 100e-6,
            bandwidth_bytes_per_sec: 1000e6,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_targets == 0 {
            return Err(Error::Config("n_targets must be at least 1".into()));
        }
        if !(self.latency_secs > 0.0 && self.latency_secs.is_finite()) {
            return Err(Error::Config("latency must be positive".into()));
        }
        if !(self.bandwidth_bytes_per_sec > 0.0 && self.bandwidth_bytes_per_sec.is_finite()) {
            return Err(Error::Config("bandwidth must be positive".into()));
        }
        Ok(())
    }

    /// Time one target needs to service `ops` operations moving `bytes`.
    pub fn target_time(&self, ops: u64, bytes: u64) -> f64 {
        ops as f64 * self.latency_secs + bytes as f64 / self.bandwidth_bytes_per_sec
    }

    /// Parses `key=value` lines: `n_targets`, `latency_us`, `bandwidth_mbps`
    /// (megabytes per second) and optionally `pool_uuid`. Blank lines and
    /// `#` comments are ignored; unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PoolConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Config(format!("line {}: invalid {what} '{value}'", lineno + 1));
            match key {
                "n_targets" => cfg.n_targets = value.parse().map_err(|_| bad(key))?,
                "latency_us" => cfg.latency_secs = value.parse::<f64>().map_err(|_| bad(key))? * 1e-6,
                "bandwidth_mbps" => {
                    cfg.bandwidth_bytes_per_sec = value.parse::<f64>().map_err(|_| bad(key))? * 1e6
                }
                "pool_uuid" => cfg.uuid = Uuid::parse_str(value).map_err(|_| bad(key))?,
                other => return Err(Error::Config(format!("line {}: unknown key '{other}'", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_kv_string(&self) -> String {
        format!(
            "pool_uuid={}\nn_targets={}\nlatency_us={}\nbandwidth_mbps={}\n",
            self.uuid,
            self.n_targets,
            self.latency_secs * 1e6,
            self.bandwidth_bytes_per_sec / 1e6
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_config() {
        let cfg = PoolConfig::parse("# pool\nn_targets = 4\nlatency_us=20\n\nbandwidth_mbps=500 # slow\n").unwrap();
        assert_eq!(cfg.n_targets, 4);
        assert!((cfg.latency_secs - 20e-6).abs() < 1e-15);
        assert!((cfg.bandwidth_bytes_per_sec - 500e6).abs() < 1e-3);
        assert_eq!(PoolConfig::parse("").unwrap(), PoolConfig::default());
    }

    #[test]
    fn parse_errors() {
        assert!(PoolConfig::parse("n_targets=0").is_err());
        assert!(PoolConfig::parse("n_targets").is_err());
        assert!(PoolConfig::parse("latency_us=-1").is_err());
        assert!(PoolConfig::parse("colour=blue").is_err());
        assert!(PoolConfig::parse("bandwidth_mbps=fast").is_err());
    }

    #[test]
    fn kv_roundtrip() {
        let cfg = PoolConfig {
            uuid: Uuid::from_u128(0xabc),
            n_targets: 3,
            latency_secs: 5e-6,
            bandwidth_bytes_per_sec: 2e9,
        };
        let back = PoolConfig::parse(&cfg.to_kv_string()).unwrap();
        assert_eq!(back.uuid, cfg.uuid);
        assert_eq!(back.n_targets, 3);
        assert!((back.latency_secs - cfg.latency_secs).abs() < 1e-15);
    }
}
