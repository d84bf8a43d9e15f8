//! Parameter table with the origin of every default.

use std::fmt::Write as _;

use crate::config::{Kind, RunConfig};
use crate::output::build_id;

fn source(key: &str) -> &'static str {
    match key {
        "trap.V0" | "trap.a_max" | "trap.a_min" | "trap.t_r" | "shake.omega" | "physical.shake_omega"
        | "thermal.ground_population" | "thermal.omega_si" | "thermal.species" | "decohere.omega_si"
        | "decohere.scattering_rates" => "reference default",
        "trap.hold_coin" | "trap.hold_shift" => "calibrated default",
        "trap.dx" | "trap.dt" | "trap.margin" | "thermal.truncation" | "shake.bins" | "shake.realizations"
        | "decohere.trajectories" | "physical.max_leakage" | "thermal.max_leakage" => "numerical default",
        k if k.starts_with("convergence.") => "numerical default",
        _ => "chosen default",
    }
}

fn show(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => format!("\"{s}\""),
        toml::Value::Float(f) => format!("{f}"),
        toml::Value::Array(a) => format!("[{}]", a.iter().map(show).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn leaves(prefix: &str, v: &toml::Value, out: &mut Vec<(String, toml::Value)>) {
    match v {
        toml::Value::Table(t) => {
            for (k, x) in t {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                leaves(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn table(config: &RunConfig) -> Vec<(String, toml::Value)> {
    let mut out = Vec::new();
    if let Ok(v) = toml::Value::try_from(config) {
        leaves("", &v, &mut out);
    }
    out.sort_by_key(|(k, _)| (k.contains('.'), k.clone()));
    out
}

/// Build identifier, seed and every parameter with its origin. Values that
/// differ from the defaults of the experiment kind are marked as overrides.
pub fn provenance(config: Option<&RunConfig>, seed: u64) -> String {
    let kind = config.map_or(Kind::Walk1d, |c| c.kind);
    let base = table(&RunConfig::new(kind).resolved());
    let mut resolved = config.map_or_else(|| RunConfig::new(kind), |c| c.clone()).resolved();
    resolved.seed = 0;
    let mut s = String::new();
    writeln!(s, "{}", build_id()).unwrap();
    writeln!(s, "seed = {seed}").unwrap();
    if config.is_none() {
        writeln!(s, "# no config given; defaults of kind walk1d").unwrap();
    }
    let mut section = String::new();
    for (key, value) in table(&resolved) {
        if key == "seed" {
            continue;
        }
        let (sec, name) = key.rsplit_once('.').unwrap_or(("", &key));
        if sec != section {
            section = sec.to_string();
            writeln!(s, "[{section}]").unwrap();
        }
        let label = match base.iter().find(|(k, _)| *k == key).map(|(_, v)| v) {
            Some(d) if d == &value => source(&key).to_string(),
            Some(d) => format!("config override; default {}, {}", show(d), source(&key)),
            None => "config".to_string(),
        };
        writeln!(s, "{name} = {}  [{label}]", show(&value)).unwrap();
    }
    s
}
