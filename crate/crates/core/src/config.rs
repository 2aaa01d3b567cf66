//! Flat `key = value` configuration with layered overrides.
//!
//! Lines are `key = value`; `#` starts a comment. Keys are flat (`eta`,
//! `kappa1`, ...) or dotted for laboratory parameters (`physical.rabi`).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{AdiabaticBounds, ModelParams, PhysicalParams};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(line, format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::config("", format!("line {}: empty key", lineno + 1)));
            }
            cfg.set(key, value.trim());
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Picks up `PREFIX_KEY=value` variables. `PREFIX_PHYSICAL_RABI` maps to
    /// `physical.rabi`, `PREFIX_FOCK_DIM` to `fock_dim`.
    pub fn from_env_vars<I>(prefix: &str, vars: I) -> Self
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut cfg = Config::new();
        let prefix = format!("{prefix}_");
        for (k, v) in vars {
            if let Some(rest) = k.strip_prefix(&prefix) {
                let lower = rest.to_ascii_lowercase();
                let key = match lower.strip_prefix("physical_") {
                    Some(field) => format!("physical.{field}"),
                    None => lower,
                };
                cfg.set(&key, v.trim());
            }
        }
        cfg
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    /// Layers `other` on top of `self`; keys in `other` win.
    pub fn merge(&mut self, other: &Config) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Error::config(key, format!("cannot parse {v:?}: {e}"))),
        }
    }

    pub fn require<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| Error::config(key, "required key is missing"))
    }

    /// Reads `key`, inserting `default` when absent so the resolved set is complete.
    pub fn get_or<T>(&mut self, key: &str, default: T) -> Result<T>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.set(key, default.to_string());
                Ok(default)
            }
        }
    }

    /// Builds [`ModelParams`]. `r`, `q` and `eta` are required; other keys default.
    pub fn model_params(&mut self) -> Result<ModelParams> {
        let r: u64 = self.require("r")?;
        let q: u64 = self.require("q")?;
        let eta: f64 = self.require("eta")?;
        let kappa1 = self.get_or("kappa1", 0.2)?;
        let kappa2 = self.get_or("kappa2", kappa1)?;
        let fock_dim = self.get_or("fock_dim", 400usize)?;
        let n_kicks = self.get_or("n_kicks", 1000u64)?;
        ModelParams::new(r, q, eta, kappa1, kappa2, fock_dim, n_kicks).map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::config(name, reason),
            Error::InvalidResonance { r, q } => Error::config(
                "q",
                format!("resonance {r}/{q} needs q > 2 after reduction"),
            ),
            other => other,
        })
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        Ok(PhysicalParams {
            rabi: self.require("physical.rabi")?,
            detuning: self.require("physical.detuning")?,
            pulse_width: self.require("physical.pulse_width")?,
            mass: self.require("physical.mass")?,
            trap_freq: self.require("physical.trap_freq")?,
            wavenumber: self.require("physical.wavenumber")?,
        })
    }

    pub fn adiabatic_bounds(&mut self) -> Result<AdiabaticBounds> {
        let d = AdiabaticBounds::default();
        Ok(AdiabaticBounds {
            max_rabi_ratio: self.get_or("physical.max_rabi_ratio", d.max_rabi_ratio)?,
            min_width_detuning: self.get_or("physical.min_width_detuning", d.min_width_detuning)?,
        })
    }

    /// Renders the configuration back into the file format.
    pub fn to_text(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}
