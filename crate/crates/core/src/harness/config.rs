//! `key = value` configuration files mirroring [`SimConfig`].
//!
//! Blank lines and `#` comments are ignored. Keys: `n`, `radius` (`auto` or a
//! number), `buffer` (`auto` or a slot count), `forward_policy`
//! (`drop`/`forward`), `failure_fraction`, `seed`, `energy_tx`, `energy_rx`,
//! `payload_len`, `lt_c`, `lt_delta`.

use std::str::FromStr;

use crate::engine::SimConfig;
use crate::error::{Error, Result};

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::param(format!("bad value {raw:?} for {key}")))
}

/// Applies one `key = value` assignment to `cfg`.
pub fn apply_config_line(cfg: &mut SimConfig, key: &str, raw: &str) -> Result<()> {
    let raw = raw.trim();
    match key.trim() {
        "n" => cfg.n = value(key, raw)?,
        "radius" => {
            cfg.radius = if raw.eq_ignore_ascii_case("auto") {
                None
            } else {
                Some(value(key, raw)?)
            }
        }
        "buffer" | "buffer_capacity" => cfg.buffer = raw.parse()?,
        "forward_policy" | "policy" => cfg.forward_policy = raw.parse()?,
        "failure_fraction" => cfg.failure_fraction = value(key, raw)?,
        "seed" => cfg.seed = value(key, raw)?,
        "energy_tx" => cfg.energy_tx = value(key, raw)?,
        "energy_rx" => cfg.energy_rx = value(key, raw)?,
        "payload_len" => cfg.payload_len = value(key, raw)?,
        "lt_c" => cfg.lt_c = value(key, raw)?,
        "lt_delta" => cfg.lt_delta = value(key, raw)?,
        other => return Err(Error::param(format!("unknown config key {other:?}"))),
    }
    Ok(())
}

/// Parses a config file on top of the defaults and validates the result.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = line.split_once('=').ok_or_else(|| {
            Error::param(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        apply_config_line(&mut cfg, key, raw)
            .map_err(|e| Error::param(format!("line {}: {e}", lineno + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}
