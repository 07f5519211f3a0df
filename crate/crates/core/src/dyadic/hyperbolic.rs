use alloc::vec::Vec;

use super::{DyadicCube, HalfSpaceSet};
use crate::math::{acosh, asinh, ceil, exp, floor, sqrt, LN_2};
use crate::{Error, Result};

/// A point `(x, y)` of the upper half-space over the torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    n: usize,
    x: [f64; 2],
    y: f64,
}

fn wrap(t: f64) -> f64 {
    let w = t - floor(t);
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

impl HalfSpacePoint {
    /// `x` is reduced into `[0,1)^n`; `y` must be positive.
    pub fn new(n: usize, x: [f64; 2], y: f64) -> Self {
        debug_assert!(y > 0.0);
        HalfSpacePoint {
            n,
            x: [wrap(x[0]), if n == 1 { 0.0 } else { wrap(x[1]) }],
            y,
        }
    }

    pub fn checked(n: usize, x: [f64; 2], y: f64) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::range("dimension", alloc::format!("n = {n}")));
        }
        if !(y > 0.0 && y.is_finite()) || !x[0].is_finite() || !x[1].is_finite() {
            return Err(Error::range("half-space point", alloc::format!("({x:?}, {y})")));
        }
        Ok(HalfSpacePoint::new(n, x, y))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> [f64; 2] {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// `ρ = arccosh(1 + (d_T² + (y − y')²)/(2yy'))`, evaluated in the equivalent
/// `2·asinh(√(d_T² + (y − y')²) / (2√(yy')))` form, which keeps precision for
/// nearby points.
pub fn hyperbolic_distance(p: &HalfSpacePoint, q: &HalfSpacePoint) -> f64 {
    let dx0 = torus_gap(p.x[0], q.x[0]);
    let dx1 = if p.n == 2 { torus_gap(p.x[1], q.x[1]) } else { 0.0 };
    let dy = p.y - q.y;
    let chord = sqrt(dx0 * dx0 + dx1 * dx1 + dy * dy);
    2.0 * asinh(chord / (2.0 * sqrt(p.y * q.y)))
}

/// Upper bound on the hyperbolic diameter of a Whitney cell, the same at
/// every level: `arccosh(1 + 2(n + 1/4))`.
pub fn cell_diameter_bound(n: usize) -> f64 {
    acosh(1.0 + 2.0 * (n as f64 + 0.25))
}

/// Distance from every cell center (levels `≤ j_max`) to the nearest cell
/// center of a fixed set, known exactly up to `reach` and `+∞` beyond it.
///
/// Building the field is the expensive step; [`ProximityField::within`] is a
/// cheap threshold, so one field serves a whole grid of radii.
#[derive(Debug, Clone)]
pub struct ProximityField {
    n: usize,
    j_max: u32,
    reach: f64,
    dist: Vec<Vec<f64>>,
}

/// Cell indices along one axis whose centers lie within `w` of `x0` on the circle.
fn axis_window(x0: f64, w: f64, level: u32) -> impl Iterator<Item = u32> {
    let side = 1i64 << level;
    let full = 2.0 * w >= 1.0;
    let scaled = x0 * side as f64;
    let (lo, hi) = if full {
        (0, side - 1)
    } else {
        let ws = w * side as f64;
        (ceil(scaled - ws - 0.5) as i64, floor(scaled + ws - 0.5) as i64)
    };
    (lo..=hi).map(move |i| i.rem_euclid(side) as u32)
}

impl ProximityField {
    pub fn new(set: &HalfSpaceSet, reach: f64) -> Self {
        let n = set.n();
        let j_max = set.j_max();
        let mut dist: Vec<Vec<f64>> =
            (0..=j_max).map(|j| alloc::vec![f64::INFINITY; 1usize << (n as u32 * j)]).collect();
        let reach = reach.max(0.0);
        // A little slack in the window so rounding never drops a boundary cell;
        // the exact distance decides membership.
        let margin = reach * (1.0 + 1e-9) + 1e-12;
        let span = floor(margin / LN_2) as u32;
        let sh = {
            let s = 0.5 * (exp(margin / 2.0) - exp(-margin / 2.0));
            4.0 * s * s
        };
        for a in set.cells() {
            let pa = a.whitney_center();
            let j0 = a.level();
            let lo = j0.saturating_sub(span);
            let hi = (j0 + span).min(j_max);
            for level in lo..=hi {
                let y = 0.75 * crate::math::exp2i(-(level as i32));
                let dy = y - pa.y;
                let budget = sh * y * pa.y - dy * dy;
                if budget < 0.0 {
                    continue;
                }
                let w = sqrt(budget);
                let row = &mut dist[level as usize];
                let mut visit = |c: DyadicCube| {
                    let d = hyperbolic_distance(&pa, &c.whitney_center());
                    if d <= reach {
                        let slot = &mut row[c.flat()];
                        if d < *slot {
                            *slot = d;
                        }
                    }
                };
                if n == 1 {
                    for i in axis_window(pa.x[0], w, level) {
                        visit(DyadicCube::raw(1, level, [i, 0]));
                    }
                } else {
                    for i1 in axis_window(pa.x[1], w, level) {
                        for i0 in axis_window(pa.x[0], w, level) {
                            visit(DyadicCube::raw(2, level, [i0, i1]));
                        }
                    }
                }
            }
        }
        ProximityField {
            n,
            j_max,
            reach,
            dist,
        }
    }

    /// Field sufficient for [`ProximityField::enlarged`] at every radius up to `r_max`.
    pub fn for_radius(set: &HalfSpaceSet, r_max: f64) -> Self {
        ProximityField::new(set, r_max + cell_diameter_bound(set.n()))
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Distance from the cell center to the set, `None` beyond the reach.
    pub fn distance(&self, cube: &DyadicCube) -> Option<f64> {
        if cube.n() != self.n || cube.level() > self.j_max {
            return None;
        }
        let d = self.dist[cube.level() as usize][cube.flat()];
        d.is_finite().then_some(d)
    }

    /// Cells whose center is within `radius` of a center of the set.
    ///
    /// # Panics
    /// If `radius` exceeds the reach the field was built with.
    pub fn within(&self, radius: f64) -> HalfSpaceSet {
        assert!(radius <= self.reach, "radius {radius} beyond field reach {}", self.reach);
        let levels = self
            .dist
            .iter()
            .map(|row| row.iter().map(|&d| d <= radius).collect())
            .collect();
        HalfSpaceSet::from_levels(self.n, levels).expect("field rows have set shape")
    }

    /// The discretized `R`-neighborhood: threshold `R + δ_cell`.
    pub fn enlarged(&self, r: f64) -> HalfSpaceSet {
        self.within(r + cell_diameter_bound(self.n))
    }
}

/// Cells (levels `≤ j_max` of `A`) whose center is within `R + δ_cell` of a
/// cell center of `A`.
pub fn enlarge(a: &HalfSpaceSet, r: f64) -> HalfSpaceSet {
    ProximityField::for_radius(a, r.max(0.0)).enlarged(r.max(0.0))
}
