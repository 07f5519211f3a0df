use alloc::vec::Vec;
use core::ops::RangeInclusive;

use super::{DyadicCube, HalfSpaceSet};
use crate::math::{exp2i, ls_slope, LN_2};
use crate::{Error, Result};

/// `(1/|Q|) ∫_Q ∫_0^{l(Q)} χ_A dy dx / y` for a cell union `A`: every cell
/// `P ⊆ Q` contributes `|P|·log 2`.
pub fn carleson_box_value(set: &HalfSpaceSet, q: &DyadicCube) -> f64 {
    carleson_box_value_to(set, q, set.j_max())
}

/// [`carleson_box_value`] counting only cells of level `≤ depth`.
pub fn carleson_box_value_to(set: &HalfSpaceSet, q: &DyadicCube, depth: u32) -> f64 {
    if q.n() != set.n() {
        return 0.0;
    }
    let n = set.n() as i32;
    let mut total = 0.0;
    for level in q.level()..=depth.min(set.j_max()) {
        let cells = set.level(level);
        let side = 1usize << level;
        let [r0, r1] = q.descendant_range(level);
        let mut count = 0usize;
        for i1 in r1 {
            count += cells[i1 * side + r0.start..i1 * side + r0.end].iter().filter(|&&b| b).count();
        }
        total += count as f64 * exp2i(-n * (level - q.level()) as i32);
    }
    total * LN_2
}

/// Depth profile of the Carleson functional of a cell union.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlesonReport {
    pub depths: Vec<u32>,
    /// `M_J`: sup over cubes of level `≤ J` of the box value with cells of level `≤ J`.
    pub values: Vec<f64>,
    /// A cube attaining `M_J` (the coarsest, then lowest index, on ties).
    pub argmax: Vec<DyadicCube>,
    /// Least-squares `dM_J/dJ` over the deepest half of the range, in units of `log 2`.
    pub slope: f64,
    pub diverging: bool,
    pub theta: f64,
}

impl CarlesonReport {
    pub fn last(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Box sums (in units of `log 2`) for every cube of level `≤ depth`, bottom-up.
fn box_sums(set: &HalfSpaceSet, depth: u32) -> Vec<Vec<f64>> {
    let n = set.n();
    let weight = exp2i(-(n as i32));
    let mut sums: Vec<Vec<f64>> = Vec::with_capacity(depth as usize + 1);
    let deepest: Vec<f64> = set.level(depth).iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    sums.push(deepest);
    for level in (0..depth).rev() {
        let below = sums.last().expect("pushed above");
        let side = 1usize << level;
        let fine = side * 2;
        let cells = set.level(level);
        let mut current = Vec::with_capacity(cells.len());
        for (flat, &occupied) in cells.iter().enumerate() {
            let children = if n == 1 {
                below[2 * flat] + below[2 * flat + 1]
            } else {
                let (i0, i1) = (flat % side, flat / side);
                let base = 2 * i1 * fine + 2 * i0;
                below[base] + below[base + 1] + below[base + fine] + below[base + fine + 1]
            };
            current.push(if occupied { 1.0 } else { 0.0 } + weight * children);
        }
        sums.push(current);
    }
    sums.reverse();
    sums
}

/// `M_J` for each `J` in `depths` and the divergence diagnosis.
///
/// The set is declared diverging when the fitted slope of `M_J` over the
/// deepest half of the range exceeds `θ·log 2`.
pub fn carleson_sup(set: &HalfSpaceSet, depths: RangeInclusive<u32>, theta: f64) -> Result<CarlesonReport> {
    if depths.is_empty() {
        return Err(Error::range("depth range", "empty"));
    }
    if *depths.end() > set.j_max() {
        return Err(Error::range(
            "depth range",
            alloc::format!("{depths:?} exceeds the set's j_max = {}", set.j_max()),
        ));
    }
    let mut report = CarlesonReport {
        depths: Vec::new(),
        values: Vec::new(),
        argmax: Vec::new(),
        slope: 0.0,
        diverging: false,
        theta,
    };
    for depth in depths {
        let sums = box_sums(set, depth);
        let mut best = (0.0f64, DyadicCube::unit(set.n()));
        for (level, row) in sums.iter().enumerate() {
            for (flat, &v) in row.iter().enumerate() {
                if v > best.0 {
                    best = (v, DyadicCube::from_flat(set.n(), level as u32, flat));
                }
            }
        }
        report.depths.push(depth);
        report.values.push(best.0 * LN_2);
        report.argmax.push(best.1);
    }
    let keep = report.depths.len().div_ceil(2);
    let tail = report.depths.len() - keep;
    let xs: Vec<f64> = report.depths[tail..].iter().map(|&d| d as f64).collect();
    let slope = ls_slope(&xs, &report.values[tail..]);
    report.slope = slope / LN_2;
    report.diverging = slope > theta * LN_2;
    Ok(report)
}
