//! JSON shapes of the reports.

use lipdist_core::distance::{Comparison, DistanceEstimate, InclusionReport, Probe};
use lipdist_core::dyadic::CarlesonReport;
use serde::Serialize;
use serde_json::{json, Value};

pub fn carleson_json(r: &CarlesonReport) -> Value {
    let argmax: Vec<Value> = r
        .argmax
        .iter()
        .map(|c| json!({ "level": c.level(), "index": &c.index()[..c.n()] }))
        .collect();
    json!({
        "depths": r.depths,
        "M_J": r.values,
        "argmax": argmax,
        "slope_log2": r.slope,
        "diverging": r.diverging,
        "theta": r.theta,
    })
}

fn probe_json(p: &Probe) -> Value {
    json!({
        "eps": p.eps,
        "cells": p.cells,
        "M_J": p.report.values,
        "slope": p.report.slope,
        "diverging": p.report.diverging,
    })
}

pub fn estimate_json(function: &str, n: usize, e: &DistanceEstimate) -> Value {
    json!({
        "function": function,
        "n": n,
        "s": e.s,
        "method": e.method.name(),
        "epsilon_star": e.eps_star,
        "bracket": [e.bracket.0, e.bracket.1],
        "resolution": e.resolution,
        "iterations": e.iterations,
        "theta": e.theta,
        "J_range": [e.j_range.0, e.j_range.1],
        "raw_epsilon_star": e.raw_eps_star,
        "tail_slope": e.tail_slope,
        "tail_guard": e.tail_guard,
        "monotone": e.monotone(),
        "sign_changes": e.sign_changes,
        "bank": e.bank,
        "slope_trace": e.trace.iter().map(probe_json).collect::<Vec<_>>(),
        "scan": e.scan.iter().map(probe_json).collect::<Vec<_>>(),
    })
}

pub fn comparison_json(function: &str, n: usize, c: &Comparison) -> Value {
    let ratios: Vec<Value> = c
        .ratios
        .iter()
        .map(|r| json!({ "a": r.a.name(), "b": r.b.name(), "ratio": r.ratio, "within_band": r.within_band }))
        .collect();
    json!({
        "estimates": c.estimates.iter().map(|e| estimate_json(function, n, e)).collect::<Vec<_>>(),
        "comparisons": { "band": c.band, "within_band": c.within_band(), "ratios": ratios },
    })
}

#[derive(Serialize)]
struct Cell {
    c: f64,
    r: f64,
    fraction: f64,
}

pub fn inclusion_json(r: &InclusionReport) -> Value {
    let grid: Vec<Cell> = r
        .grid
        .iter()
        .map(|g| Cell {
            c: g.c,
            r: g.r,
            fraction: g.fraction,
        })
        .collect();
    json!({
        "source": r.source,
        "target": r.target,
        "eps_source": r.eps_source,
        "eps_target": r.eps_target,
        "source_cells": r.source_cells,
        "eta": r.eta,
        "grid": grid,
        "achieved": r.achieved.map(|(c, rad)| json!({ "c": c, "R": rad })),
    })
}
