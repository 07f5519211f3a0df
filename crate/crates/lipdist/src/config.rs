//! Run configuration: a `key = value` file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use lipdist_core::distance::EstimateConfig;
use lipdist_core::gridfn::depth_range;
use lipdist_core::secdiff::ProbeConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub jgrid: u32,
    pub s: f64,
    pub wavelet_p: usize,
    pub theta: f64,
    pub jrange: (u32, u32),
    pub directions: usize,
    pub probes_per_cell: usize,
    pub out: PathBuf,
    pub seed: u64,
    /// Random pairs per continuity check.
    pub pairs: usize,
    /// Comparability band for `ε₀` ratios.
    pub band: f64,
    /// Tail-decay guard for `ε₀`, in `log2` units per level; 0 disables it.
    pub tail_decay: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 1,
            jgrid: 14,
            s: 1.0,
            wavelet_p: 8,
            theta: 0.1,
            jrange: (6, 12),
            directions: 8,
            probes_per_cell: 8,
            out: PathBuf::from("out"),
            seed: 1,
            pairs: 10_000,
            band: 32.0,
            tail_decay: 0.75,
        }
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Validation(format!("invalid value {value:?} for `{key}`"))
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| bad(key, value))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys match the long flag names, with
    /// `-` or `_` accepted.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        match key.as_str() {
            "n" => self.n = num(&key, value)?,
            "jgrid" => self.jgrid = num(&key, value)?,
            "s" => self.s = num(&key, value)?,
            "wavelet-p" => self.wavelet_p = num(&key, value)?,
            "theta" => self.theta = num(&key, value)?,
            "jrange" => {
                let (a, b) = value.split_once("..").ok_or_else(|| bad(&key, value))?;
                self.jrange = (num(&key, a)?, num(&key, b)?);
            }
            "directions" => self.directions = num(&key, value)?,
            "probes-per-cell" => self.probes_per_cell = num(&key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "seed" => self.seed = num(&key, value)?,
            "pairs" => self.pairs = num(&key, value)?,
            "band" => self.band = num(&key, value)?,
            "tail-decay" => self.tail_decay = num(&key, value)?,
            _ => return Err(CliError::Validation(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", no + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::Validation(m));
        if !(1..=2).contains(&self.n) {
            return fail(format!("n = {} must be 1 or 2", self.n));
        }
        let depths = depth_range(self.n);
        if !depths.contains(&self.jgrid) {
            return fail(format!("jgrid = {} outside {depths:?} for n = {}", self.jgrid, self.n));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return fail(format!("s = {} must satisfy 0 < s ≤ 1", self.s));
        }
        if !(2..=10).contains(&self.wavelet_p) {
            return fail(format!("wavelet-p = {} outside 2..=10", self.wavelet_p));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return fail(format!("theta = {} must be positive", self.theta));
        }
        let (a, b) = self.jrange;
        if a > b || b + 2 > self.jgrid {
            return fail(format!("jrange = {a}..{b} needs start ≤ end ≤ jgrid − 2 = {}", self.jgrid as i64 - 2));
        }
        if self.directions == 0 || self.probes_per_cell == 0 || self.pairs == 0 {
            return fail("directions, probes-per-cell and pairs must be positive".into());
        }
        if !(self.band >= 1.0) {
            return fail(format!("band = {} must be ≥ 1", self.band));
        }
        if !(self.tail_decay >= 0.0) {
            return fail(format!("tail-decay = {} must be ≥ 0", self.tail_decay));
        }
        Ok(())
    }

    pub fn estimate(&self) -> EstimateConfig {
        EstimateConfig {
            j_range: self.jrange.0..=self.jrange.1,
            theta: self.theta,
            wavelet_p: self.wavelet_p,
            probes: self.probes(),
            iterations: 20,
            tail_decay: (self.tail_decay > 0.0).then_some(self.tail_decay),
        }
    }

    pub fn probes(&self) -> ProbeConfig {
        ProbeConfig {
            probes_per_cell: self.probes_per_cell,
            directions: self.directions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nn = 2\njgrid=8\n\njrange = 3..6\nwavelet_p = 4\n").unwrap();
        assert_eq!((c.n, c.jgrid, c.jrange, c.wavelet_p), (2, 8, (3, 6), 4));
        c.set("s", "0.5").unwrap();
        assert_eq!(c.s, 0.5);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("n = two").is_err());
        assert!(c.apply_text("just words").is_err());
        c.jgrid = 12;
        c.n = 2;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.jrange = (5, 13);
        assert!(c.validate().is_err());
        c = RunConfig { s: 1.5, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }
}
