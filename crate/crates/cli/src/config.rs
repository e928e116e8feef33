//! Flat key-value configuration file (TOML syntax).
//!
//! Every key is optional. A flag given on the command line wins over the
//! file, and the file wins over the built-in default.

use std::path::Path;

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub format: Option<String>,
    pub no_timestamp: Option<bool>,
    pub precision: Option<u32>,
    pub degrees: Option<usize>,
    pub x0: Option<String>,
    pub degree_cap: Option<usize>,
    pub iters: Option<usize>,
    pub dioph_x0: Option<String>,
    pub dioph_x1: Option<String>,
    pub stop_bits: Option<u64>,
    pub bit_budget: Option<u64>,
    pub n_start: Option<i64>,
    pub max_steps: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Config::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Config> {
        Ok(toml::from_str(text)?)
    }
}
