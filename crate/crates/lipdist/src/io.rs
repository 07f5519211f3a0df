//! File formats: function samples, sets, coefficients, fields and reports.

use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use lipdist_core::dyadic::{CellField, DyadicCube, HalfSpaceSet};
use lipdist_core::gridfn::{parse_function_spec, synthesize_with, SynthOptions};
use lipdist_core::wavelet::WaveletCoefficients;
use lipdist_core::GridFunction;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

/// Reads one sample per line; blank lines are skipped.
pub fn read_samples(path: &str) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| l.parse::<f64>().map_err(|_| format!("{path}: line {}: not a number: {l:?}", i + 1)))
        .collect()
}

/// Parses and samples a function spec on the configured grid.
pub fn load_function(spec: &str, config: &RunConfig) -> Result<GridFunction, CliError> {
    let parsed = parse_function_spec(spec)?;
    let loader = |p: &str| read_samples(p);
    let opts = SynthOptions {
        wavelet_p: config.wavelet_p,
        loader: Some(&loader),
    };
    Ok(synthesize_with(&parsed, config.n, config.jgrid, &opts)?)
}

fn cube_index(c: &DyadicCube) -> Vec<u64> {
    let mut v = vec![c.level() as u64, c.index()[0] as u64];
    if c.n() == 2 {
        v.push(c.index()[1] as u64);
    }
    v
}

/// `{n, J_max, cells: [[j, k…], …]}`.
pub fn set_json(set: &HalfSpaceSet) -> Value {
    let cells: Vec<Vec<u64>> = set.cells().map(|c| cube_index(&c)).collect();
    json!({ "n": set.n(), "J_max": set.j_max(), "cells": cells })
}

#[derive(Deserialize)]
struct SetFile {
    n: usize,
    #[serde(rename = "J_max")]
    j_max: u32,
    cells: Vec<Vec<u32>>,
}

pub fn parse_set_json(text: &str) -> Result<HalfSpaceSet, CliError> {
    let file: SetFile = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("set JSON: {e}")))?;
    if !(1..=2).contains(&file.n) {
        return Err(CliError::Validation(format!("set JSON: n = {}", file.n)));
    }
    let mut set = HalfSpaceSet::empty(file.n, file.j_max);
    for cell in &file.cells {
        if cell.len() != file.n + 1 {
            return Err(CliError::Validation(format!("set JSON: cell {cell:?} needs {} entries", file.n + 1)));
        }
        let index = [cell[1], if file.n == 2 { cell[2] } else { 0 }];
        set.insert(DyadicCube::new(file.n, cell[0], index)?)?;
    }
    Ok(set)
}

/// One cell per row: `level,k0[,k1],x0[,x1],y` with the Whitney center.
pub fn set_csv(set: &HalfSpaceSet) -> String {
    let mut out = String::from(if set.n() == 1 { "level,k0,x0,y\n" } else { "level,k0,k1,x0,x1,y\n" });
    for c in set.cells() {
        let p = c.whitney_center();
        if set.n() == 1 {
            out += &format!("{},{},{},{}\n", c.level(), c.index()[0], p.x()[0], p.y());
        } else {
            out += &format!("{},{},{},{},{},{}\n", c.level(), c.index()[0], c.index()[1], p.x()[0], p.x()[1], p.y());
        }
    }
    out
}

/// One cell per row: `level,k0[,k1],value`.
pub fn field_csv(field: &CellField) -> String {
    let n = field.n();
    let mut out = String::from(if n == 1 { "level,k0,value\n" } else { "level,k0,k1,value\n" });
    for (j, flat, v) in field.entries() {
        let c = DyadicCube::from_flat(n, j, flat);
        if n == 1 {
            out += &format!("{j},{},{v}\n", c.index()[0]);
        } else {
            out += &format!("{j},{},{},{v}\n", c.index()[0], c.index()[1]);
        }
    }
    out
}

/// `{n, depth, bank, d, coefficients: [[l, j, k…, value], …]}` with nonzero entries only.
pub fn coefficients_json(c: &WaveletCoefficients, bank: &str) -> Value {
    let entries: Vec<Value> = c
        .iter()
        .filter(|&(.., v)| v != 0.0)
        .map(|(l, j, k, v)| {
            if c.n() == 1 {
                json!([l, j, k[0], v])
            } else {
                json!([l, j, k[0], k[1], v])
            }
        })
        .collect();
    json!({ "n": c.n(), "depth": c.depth(), "bank": bank, "d": c.d(), "coefficients": entries })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(())
}

/// Report envelope: everything but `timestamp` is a function of the inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub spec: Option<String>,
    pub input_hash: String,
    pub timestamp: u64,
    pub config: RunConfig,
    pub result: T,
}

pub fn input_hash(command: &str, spec: Option<&str>, config: &RunConfig, extra: &str) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update([0]);
    h.update(spec.unwrap_or("").as_bytes());
    h.update([0]);
    h.update(serde_json::to_vec(config).expect("config serializes"));
    h.update([0]);
    h.update(extra.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn envelope<T: Serialize>(command: &str, spec: Option<&str>, config: &RunConfig, extra: &str, result: T) -> Envelope<T> {
    Envelope {
        tool: "lipdist",
        version: env!("CARGO_PKG_VERSION"),
        command: command.into(),
        spec: spec.map(String::from),
        input_hash: input_hash(command, spec, config, extra),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        config: config.clone(),
        result,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_round_trip() {
        for n in [1, 2] {
            let set = HalfSpaceSet::from_predicate(n, 4, |c| (c.flat() + c.level() as usize) % 3 == 0);
            let back = parse_set_json(&set_json(&set).to_string()).unwrap();
            assert_eq!(back, set);
            assert_eq!(set_csv(&set).lines().count(), set.len() + 1);
        }
        assert!(parse_set_json(r#"{"n":1,"J_max":2,"cells":[[3,0]]}"#).is_err());
        assert!(parse_set_json(r#"{"n":1,"J_max":2,"cells":[[1,5]]}"#).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn hash_tracks_inputs() {
        let c = RunConfig::default();
        let a = input_hash("sets", Some("xlogx"), &c, "");
        assert_eq!(a, input_hash("sets", Some("xlogx"), &c, ""));
        assert_ne!(a, input_hash("sets", Some("xlogx"), &RunConfig { seed: 9, ..c.clone() }, ""));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn samples_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        let samples: String = (0..16).map(|i| format!("{}\n", i as f64 / 16.0)).collect();
        std::fs::write(&p, samples).unwrap();
        let cfg = RunConfig { jgrid: 4, ..RunConfig::default() };
        let f = load_function(&format!("file path={}", p.display()), &cfg).unwrap();
        assert_eq!(f.samples()[3], 3.0 / 16.0);
        let bad = RunConfig { jgrid: 5, ..RunConfig::default() };
        assert!(matches!(load_function(&format!("file path={}", p.display()), &bad), Err(CliError::Validation(_))));
        std::fs::write(&p, "1\nx\n").unwrap();
        assert!(read_samples(p.to_str().unwrap()).is_err());
    }
}
