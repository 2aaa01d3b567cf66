//! Configuration layering and the keys shared between commands.

use std::path::Path;

use dkho::config::Config;
use dkho::fockspace::LeakagePolicy;
use dkho::params::{alpha_from_phasepoint, PhasePoint};
use dkho::{Error, Result};
use num_complex::Complex64;

use crate::RunArgs;

pub const ENV_PREFIX: &str = "DKHO";

/// File < environment < flags < `--set`.
pub fn resolve(args: &RunArgs) -> Result<Config> {
    let mut cfg = match &args.config {
        Some(path) => load(path)?,
        None => Config::new(),
    };
    cfg.merge(&Config::from_env_vars(ENV_PREFIX, std::env::vars()));
    cfg.merge(&flags(args)?);
    Ok(cfg)
}

fn load(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|x| x == "json") {
        from_manifest(&text)
    } else {
        Config::parse(&text)
    }
}

/// Reads the `config` object of a run manifest.
fn from_manifest(text: &str) -> Result<Config> {
    let json: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
    let object = json
        .get("config")
        .and_then(|c| c.as_object())
        .ok_or_else(|| Error::config("config", "manifest has no `config` object"))?;
    let mut cfg = Config::new();
    for (k, v) in object {
        let value = match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            _ => {
                return Err(Error::config(
                    k.clone(),
                    "expected a string, number or boolean",
                ))
            }
        };
        cfg.set(k, value);
    }
    Ok(cfg)
}

fn flags(args: &RunArgs) -> Result<Config> {
    let mut cfg = Config::new();
    let mut put = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            cfg.set(key, v);
        }
    };
    put("r", args.r.map(|v| v.to_string()));
    put("q", args.q.map(|v| v.to_string()));
    put("eta", args.eta.map(|v| v.to_string()));
    put("kappa1", args.kappa1.map(|v| v.to_string()));
    put("kappa2", args.kappa2.map(|v| v.to_string()));
    put("alpha_re", args.alpha_re.map(|v| v.to_string()));
    put("alpha_im", args.alpha_im.map(|v| v.to_string()));
    put("n_kicks", args.n_kicks.map(|v| v.to_string()));
    put("fock_dim", args.fock_dim.map(|v| v.to_string()));
    for pair in &args.overrides {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::config(pair.clone(), "--set expects KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim());
    }
    Ok(cfg)
}

pub fn leakage_policy(cfg: &mut Config) -> Result<LeakagePolicy> {
    let d = LeakagePolicy::default();
    let window_fraction = cfg.get_or("leak_window", d.window_fraction)?;
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::config("leak_window", "must lie in (0, 1]"));
    }
    let warn = cfg.get_or("leak_warn", d.warn)?;
    let error = cfg.get_or("leak_error", d.error)?;
    for (key, v) in [("leak_warn", warn), ("leak_error", error)] {
        if v.is_nan() || v <= 0.0 {
            return Err(Error::config(key, "must be positive"));
        }
    }
    Ok(LeakagePolicy {
        window_fraction,
        warn,
        error,
    })
}

/// Phase-space start `(x0, p0)`, default the hyperbolic point `(1, 0)`.
pub fn start_point(cfg: &mut Config) -> Result<PhasePoint> {
    Ok(PhasePoint::new(
        cfg.get_or("x0", 1.0)?,
        cfg.get_or("p0", 0.0)?,
    ))
}

/// Coherent amplitude of the initial state: `alpha_re`/`alpha_im` when either
/// is given, otherwise derived from `(x0, p0)`. Both forms end up in the config.
pub fn initial_alpha(cfg: &mut Config, eta: f64) -> Result<Complex64> {
    let alpha = if cfg.contains("alpha_re") || cfg.contains("alpha_im") {
        Complex64::new(cfg.get_or("alpha_re", 0.0)?, cfg.get_or("alpha_im", 0.0)?)
    } else {
        let a = alpha_from_phasepoint(start_point(cfg)?, eta);
        cfg.set("alpha_re", a.re.to_string());
        cfg.set("alpha_im", a.im.to_string());
        a
    };
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::config(
            "alpha_re",
            "initial amplitude must be finite",
        ));
    }
    Ok(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_config_accepts_strings_and_numbers() {
        let cfg =
            from_manifest(r#"{"command":"overlap","config":{"eta":"0.5","q":6,"dump":true}}"#)
                .unwrap();
        assert_eq!(cfg.raw("eta"), Some("0.5"));
        assert_eq!(cfg.raw("q"), Some("6"));
        assert_eq!(cfg.raw("dump"), Some("true"));
        assert!(from_manifest(r#"{"config":{"eta":[1]}}"#)
            .unwrap_err()
            .is_config());
        assert!(from_manifest("{}").unwrap_err().is_config());
    }

    #[test]
    fn alpha_is_recorded_when_derived() {
        let mut cfg = Config::parse("x0 = 0\np0 = 2").unwrap();
        let a = initial_alpha(&mut cfg, 0.5).unwrap();
        assert!((a.im - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(cfg.get::<f64>("alpha_im").unwrap(), Some(a.im));
    }

    #[test]
    fn leakage_keys_are_validated() {
        let mut cfg = Config::parse("leak_window = 0").unwrap();
        assert!(leakage_policy(&mut cfg).is_err());
        let mut cfg = Config::parse("leak_error = 1").unwrap();
        assert_eq!(leakage_policy(&mut cfg).unwrap().error, 1.0);
    }
}
