//! The five commands. Each writes its files under `config.out` and returns the
//! JSON body it wrote.

use std::path::PathBuf;

use lipdist_core::distance::{compare_methods, epsilon_star_for, inclusion_probe, method_field, Method};
use lipdist_core::dyadic::carleson_sup;
use lipdist_core::gridfn::sup_norm;
use lipdist_core::poisson::{holder_poisson_norm, jbmo_direct_norm};
use lipdist_core::secdiff::holder_seminorm_with;
use lipdist_core::wavelet::{analyze, filter_bank, jbmo_wavelet_norm, lip_wavelet_norm};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io::{coefficients_json, envelope, field_csv, load_function, set_csv, set_json, write_atomic, write_json};
use crate::report::{carleson_json, comparison_json, inclusion_json};
use crate::validate::{run_all, CriterionResult, Settings};

fn out(config: &RunConfig, name: &str) -> PathBuf {
    config.out.join(name)
}

/// Every norm of the six characterizations plus their pairwise ratios.
pub fn seminorms(spec: &str, config: &RunConfig) -> Result<Value, CliError> {
    config.validate()?;
    let f = load_function(spec, config)?;
    let s = config.s;
    let bank = filter_bank(config.wavelet_p)?;
    let c = analyze(&f, &bank)?;
    let holder = holder_seminorm_with(&f, s, config.directions)? + sup_norm(&f);
    let mut norms: Vec<(&str, f64)> = vec![("holder", holder)];
    if s == 1.0 {
        norms.push(("zygmund", holder));
    }
    norms.push(("wavelet_lip", lip_wavelet_norm(&c, s)));
    norms.push(("wavelet_jbmo", jbmo_wavelet_norm(&c, s)));
    norms.push(("direct_jbmo", jbmo_direct_norm(&f, s, config.jgrid)?));
    norms.push(("poisson", holder_poisson_norm(&f, s)?));

    let mut ratios = serde_json::Map::new();
    let mut csv = String::from("norm,value\n");
    for (i, (a, x)) in norms.iter().enumerate() {
        csv += &format!("{a},{x}\n");
        for (b, y) in &norms[i + 1..] {
            let r = if *x == 0.0 && *y == 0.0 { 1.0 } else { x / y };
            ratios.insert(format!("{a}/{b}"), json!(r));
        }
    }
    let body = json!({
        "function": spec,
        "s": s,
        "bank": bank.name(),
        "norms": norms.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "ratios": ratios,
    });
    write_json(&out(config, "seminorms.json"), &envelope("seminorms", Some(spec), config, "", &body))?;
    write_atomic(&out(config, "seminorms.csv"), csv.as_bytes())?;
    Ok(body)
}

/// `eps` is absolute, or a multiple of the method's `ε_hi` when `relative`.
pub fn sets(spec: &str, config: &RunConfig, eps: f64, relative: bool, method: Method) -> Result<Value, CliError> {
    config.validate()?;
    if !(eps >= 0.0) {
        return Err(CliError::Validation(format!("ε = {eps} must be ≥ 0")));
    }
    let f = load_function(spec, config)?;
    let est = config.estimate();
    let field = method_field(&f, config.s, method, &est)?;
    let threshold = if relative { eps * field.eps_hi } else { eps };
    let set = field.set(threshold);
    let report = carleson_sup(&set, est.j_range.clone(), config.theta)?;
    let name = method.name();
    write_json(&out(config, &format!("set_{name}.json")), &set_json(&set))?;
    write_atomic(&out(config, &format!("set_{name}.csv")), set_csv(&set).as_bytes())?;
    write_atomic(&out(config, &format!("field_{name}.csv")), field_csv(&field.field).as_bytes())?;
    if method == Method::Wavelet {
        let bank = filter_bank(config.wavelet_p)?;
        let c = analyze(&f, &bank)?;
        write_json(&out(config, "coefficients.json"), &coefficients_json(&c, &bank.name()))?;
    }
    let body = json!({
        "function": spec,
        "method": name,
        "s": config.s,
        "eps": threshold,
        "eps_hi": field.eps_hi,
        "cells": set.len(),
        "level_counts": (0..=set.j_max()).map(|j| set.level_count(j)).collect::<Vec<_>>(),
        "carleson": carleson_json(&report),
    });
    let extra = format!("{name} {threshold:e}");
    write_json(&out(config, &format!("sets_{name}.json")), &envelope("sets", Some(spec), config, &extra, &body))?;
    Ok(body)
}

pub fn distance(spec: &str, config: &RunConfig) -> Result<Value, CliError> {
    config.validate()?;
    let f = load_function(spec, config)?;
    let cmp = compare_methods(&f, config.s, &config.estimate(), config.band)?;
    let body = comparison_json(spec, config.n, &cmp);
    write_json(&out(config, "distance.json"), &envelope("distance", Some(spec), config, "", &body))?;
    Ok(body)
}

/// `source ⊆ target(c·ε)_R` with both thresholds at `frac` times the midpoint
/// of each method's `ε₀` bracket.
pub fn inclusion(spec: &str, config: &RunConfig, frac: f64, source: Method, target: Method) -> Result<Value, CliError> {
    config.validate()?;
    if !(frac > 0.0) {
        return Err(CliError::Validation(format!("fraction {frac} must be positive")));
    }
    let f = load_function(spec, config)?;
    let est = config.estimate();
    let src = method_field(&f, config.s, source, &est)?;
    let tgt = method_field(&f, config.s, target, &est)?;
    let mid = |m| -> Result<f64, CliError> {
        let e = epsilon_star_for(m, &est)?;
        Ok(0.5 * (e.bracket.0 + e.bracket.1))
    };
    let (ms, mt) = (mid(&src)?, mid(&tgt)?);
    let report = inclusion_probe(
        &src,
        frac * ms,
        &tgt,
        frac * mt,
        &[1.0, 0.5, 0.25, 0.125],
        &[0.5, 1.0, 2.0, 4.0],
        0.99,
    )?;
    let body = inclusion_json(&report);
    let extra = format!("{source} {target} {frac:e}");
    let name = format!("inclusion_{source}_{target}.json");
    write_json(&out(config, &name), &envelope("inclusion", Some(spec), config, &extra, &body))?;
    Ok(body)
}

/// Runs the acceptance suite; `Ok((all passed, results))`.
pub fn validate(config: &RunConfig) -> Result<(bool, Vec<CriterionResult>), CliError> {
    config.validate()?;
    if config.jgrid < 8 {
        eprintln!(
            "warning: jgrid = {} under-resolves the corpus; the suite uses its own grids",
            config.jgrid
        );
    }
    let results = run_all(&Settings::from(config));
    let passed = results.iter().all(|r| r.passed);
    let body = json!({ "passed": passed, "criteria": results });
    write_json(&out(config, "validate.json"), &envelope("validate", None, config, "", &body))?;
    Ok((passed, results))
}
