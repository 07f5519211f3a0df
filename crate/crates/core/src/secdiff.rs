//! Maximal second differences `Δ₂f(x,y) = sup_{|h|=y} |f(x+h) − 2f(x) + f(x−h)|`,
//! the Hölder–Zygmund seminorm, the set `S(s,f,ε)` and the continuity checks
//! for `Δ₂f` in `(x,y)`.
//!
//! Points and steps live on the sampling lattice: `x` is a lattice index and
//! `y = m·2^{-J_grid}` for an integer `m ≥ 1`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{CellField, DyadicCube, HalfSpaceSet};
use crate::gridfn::{sup_norm, GridFunction};
use crate::math::{cos, exp, ln, powf, round, sin, sqrt, PI};
use crate::{Error, Result};

/// Per-cell probe maximum of `Δ₂f(x,y)/y^s`.
pub type SecondDiffField = CellField;

/// Probe layout shared by the second-difference computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    /// Probe points per cell side (the x stride is `cell width / probes_per_cell`).
    pub probes_per_cell: usize,
    /// Number of directions for `n = 2`; ignored for `n = 1`.
    pub directions: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            probes_per_cell: 8,
            directions: 8,
        }
    }
}

pub(crate) fn check_exponent(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::range("s", alloc::format!("s = {s}; need 0 < s ≤ 1")));
    }
    Ok(())
}

/// Lattice steps of length `m` (within 2%) along `k` angles evenly spaced in
/// `[0, π)`, deduplicated. For `n = 1` this is just `±m`.
pub fn lattice_directions(n: usize, m: u64, k: usize) -> Vec<[i64; 2]> {
    let m = m as i64;
    if n == 1 {
        return alloc::vec![[m, 0]];
    }
    let len = m as f64;
    let mut out: Vec<[i64; 2]> = Vec::new();
    for i in 0..k.max(1) {
        let theta = PI * i as f64 / k.max(1) as f64;
        let target = [len * cos(theta), len * sin(theta)];
        let (r0, r1) = (round(target[0]) as i64, round(target[1]) as i64);
        let mut best: Option<([i64; 2], f64)> = None;
        for a in r0 - 2..=r0 + 2 {
            for b in r1 - 2..=r1 + 2 {
                let norm = sqrt((a * a + b * b) as f64);
                if (norm - len).abs() > 0.02 * len {
                    continue;
                }
                let (e0, e1) = (a as f64 - target[0], b as f64 - target[1]);
                let miss = e0 * e0 + e1 * e1;
                if best.is_none_or(|(_, d)| miss < d) {
                    best = Some(([a, b], miss));
                }
            }
        }
        if let Some((v, _)) = best {
            let neg = [-v[0], -v[1]];
            if !out.contains(&v) && !out.contains(&neg) {
                out.push(v);
            }
        }
    }
    out
}

/// Periodic sampler with power-of-two masking.
struct Lattice<'a> {
    n: usize,
    side: usize,
    mask: i64,
    samples: &'a [f64],
}

impl<'a> Lattice<'a> {
    fn new(f: &'a GridFunction) -> Self {
        Lattice {
            n: f.n(),
            side: f.side(),
            mask: f.side() as i64 - 1,
            samples: f.samples(),
        }
    }

    #[inline]
    fn at(&self, x0: i64, x1: i64) -> f64 {
        let i0 = (x0 & self.mask) as usize;
        if self.n == 1 {
            self.samples[i0]
        } else {
            self.samples[((x1 & self.mask) as usize) * self.side + i0]
        }
    }

    #[inline]
    fn second_difference(&self, x: [i64; 2], dirs: &[[i64; 2]]) -> f64 {
        let center = 2.0 * self.at(x[0], x[1]);
        dirs.iter().fold(0.0f64, |best, h| {
            let v = (self.at(x[0] + h[0], x[1] + h[1]) + self.at(x[0] - h[0], x[1] - h[1])) - center;
            best.max(v.abs())
        })
    }
}

/// `Δ₂f(x, m·2^{-J_grid})` with `directions` angles for `n = 2`.
pub fn second_difference(f: &GridFunction, x: [i64; 2], m: u64, directions: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::UnderResolved("second difference step below grid spacing".into()));
    }
    let dirs = lattice_directions(f.n(), m, directions);
    Ok(Lattice::new(f).second_difference(x, &dirs))
}

/// Maximum of `Δ₂f/y^s` over the lattice for each step `m` in `steps`.
fn scan(f: &GridFunction, s: f64, steps: &[u64], directions: usize) -> (f64, [i64; 2], u64) {
    let lat = Lattice::new(f);
    let h = f.spacing();
    let mut best = (0.0f64, [0i64, 0], steps.first().copied().unwrap_or(1));
    for &m in steps {
        let dirs = lattice_directions(f.n(), m, directions);
        let inv = powf(m as f64 * h, -s);
        for flat in 0..f.samples().len() {
            let x = f.coords(flat);
            let v = lat.second_difference(x, &dirs) * inv;
            if v > best.0 {
                best = (v, x, m);
            }
        }
    }
    best
}

/// Dyadic probe steps `y = 2^{-j}`, `j = 1..J_grid−1`.
fn dyadic_steps(depth: u32) -> Vec<u64> {
    (1..depth).map(|j| 1u64 << (depth - j)).collect()
}

/// `y ∈ {1, 5/4, 3/2, 7/4}·2^{-j}` rounded to the lattice, `y < 1`.
fn refined_steps(depth: u32) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for j in 1..depth {
        let base = (1u64 << (depth - j)) as f64;
        for q in 0..4 {
            let m = round(base * (4 + q) as f64 / 4.0) as u64;
            if m >= 1 && m < 1u64 << depth && !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// `sup_{x, y=2^{-j}} Δ₂f(x,y)/y^s` over all lattice points and `j = 1..J_grid−1`.
pub fn holder_seminorm(f: &GridFunction, s: f64) -> Result<f64> {
    holder_seminorm_with(f, s, ProbeConfig::default().directions)
}

pub fn holder_seminorm_with(f: &GridFunction, s: f64, directions: usize) -> Result<f64> {
    check_exponent(s)?;
    Ok(scan(f, s, &dyadic_steps(f.depth()), directions).0)
}

/// The seminorm together with where it is attained and how much a 4× finer
/// set of probe scales raises it.
#[derive(Debug, Clone, PartialEq)]
pub struct HolderReport {
    pub s: f64,
    pub value: f64,
    pub argmax_x: [i64; 2],
    pub argmax_y: f64,
    /// Maximum over `y ∈ {1, 5/4, 3/2, 7/4}·2^{-j}`.
    pub refined: f64,
    /// `(refined − value)/refined`, the share of the sup missed by dyadic probes.
    pub resolution_bias: f64,
}

pub fn holder_report(f: &GridFunction, s: f64, directions: usize) -> Result<HolderReport> {
    check_exponent(s)?;
    let (value, x, m) = scan(f, s, &dyadic_steps(f.depth()), directions);
    let (refined, ..) = scan(f, s, &refined_steps(f.depth()), directions);
    let refined = refined.max(value);
    Ok(HolderReport {
        s,
        value,
        argmax_x: x,
        argmax_y: m as f64 * f.spacing(),
        refined,
        resolution_bias: if refined > 0.0 { (refined - value) / refined } else { 0.0 },
    })
}

/// Steps `m` for the probe heights `{5/8, 3/4, 7/8, 1}·l(Q)` of a level-`j` cell.
pub(crate) fn cell_heights(depth: u32, j: u32) -> Vec<u64> {
    let width = (1u64 << (depth - j)) as f64;
    let mut out: Vec<u64> = Vec::new();
    for q in 5..=8 {
        let m = (round(width * q as f64 / 8.0) as u64).max(1);
        if !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Lattice offsets of the probe points inside a cell of width `width` samples.
pub(crate) fn cell_offsets(width: usize, probes_per_cell: usize) -> Vec<i64> {
    let stride = (width / probes_per_cell.max(1)).max(1);
    (0..width).step_by(stride).map(|t| t as i64).collect()
}

pub(crate) fn check_depth(f: &GridFunction, j_max: u32) -> Result<()> {
    if j_max + 2 > f.depth() {
        return Err(Error::range(
            "J_max",
            alloc::format!("J_max = {j_max} needs J_max ≤ J_grid − 2 = {}", f.depth() as i64 - 2),
        ));
    }
    Ok(())
}

/// `max Δ₂f(x,y)/y^s` over the probe grid of every Whitney cell of levels `0..=j_max`.
pub fn second_difference_field(f: &GridFunction, s: f64, j_max: u32, probes: ProbeConfig) -> Result<SecondDiffField> {
    check_exponent(s)?;
    check_depth(f, j_max)?;
    let lat = Lattice::new(f);
    let depth = f.depth();
    let h = f.spacing();
    let n = f.n();
    let mut values = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let heights: Vec<(Vec<[i64; 2]>, f64)> = cell_heights(depth, j)
            .into_iter()
            .map(|m| (lattice_directions(n, m, probes.directions), powf(m as f64 * h, -s)))
            .collect();
        let width = 1usize << (depth - j);
        let offsets = cell_offsets(width, probes.probes_per_cell);
        let cells = 1usize << (n as u32 * j);
        let mut level = Vec::with_capacity(cells);
        for flat in 0..cells {
            let cube = DyadicCube::from_flat(n, j, flat);
            let origin = [cube.index()[0] as i64 * width as i64, cube.index()[1] as i64 * width as i64];
            let mut best = 0.0f64;
            let rows: &[i64] = if n == 1 { &[0] } else { &offsets };
            for &t1 in rows {
                for &t0 in &offsets {
                    let x = [origin[0] + t0, origin[1] + t1];
                    for (dirs, inv) in &heights {
                        best = best.max(lat.second_difference(x, dirs) * inv);
                    }
                }
            }
            level.push(best);
        }
        values.push(level);
    }
    CellField::from_levels(n, values)
}

/// `S(s,f,ε)`: Whitney cells whose probe maximum of `Δ₂f/y^s` exceeds `ε`.
pub fn build_s(f: &GridFunction, s: f64, eps: f64, j_max: u32, probes_per_cell: usize) -> Result<HalfSpaceSet> {
    let probes = ProbeConfig {
        probes_per_cell,
        ..ProbeConfig::default()
    };
    Ok(second_difference_field(f, s, j_max, probes)?.threshold(eps))
}

/// Largest observed `|Δ₂f(x,y) − Δ₂f(x',y')| / (‖f‖_{lip s}·modulus)` over
/// random admissible pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub s: f64,
    pub pairs: usize,
    /// `holder_seminorm + sup_norm`.
    pub norm: f64,
    pub max_ratio: f64,
}

/// Log-uniform integer in `[lo, hi]`.
fn log_uniform(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> u64 {
    if hi <= lo {
        return lo;
    }
    let t: f64 = rng.gen_range(ln(lo as f64)..=ln(hi as f64 + 0.999));
    (exp(t) as u64).clamp(lo, hi)
}

/// `|x−x'|^s + |y−y'|^s` for `s < 1`; for `s = 1` the logarithmic modulus
/// `|x−x'| log(e + y/|x−x'|) + |y−y'| log(e + y/|y−y'|)`.
fn modulus(s: f64, dx: f64, dy: f64, y: f64) -> f64 {
    if s < 1.0 {
        powf(dx, s) + powf(dy, s)
    } else {
        let term = |d: f64| if d == 0.0 { 0.0 } else { d * ln(core::f64::consts::E + y / d) };
        term(dx) + term(dy)
    }
}

/// Samples pairs `(x,y), (x',y')` with `1/2 < y/y' < 2` (and `|x−x'| < y/2`
/// when `s = 1`), close in a log-uniform sense so both small and large
/// separations are covered.
pub fn continuity_check(
    f: &GridFunction,
    s: f64,
    sample_count: usize,
    seed: u64,
    directions: usize,
) -> Result<ContinuityReport> {
    check_exponent(s)?;
    let norm = holder_seminorm_with(f, s, directions)? + sup_norm(f);
    if norm == 0.0 {
        return Err(Error::Degenerate("continuity check of the zero function"));
    }
    let lat = Lattice::new(f);
    let side = f.side() as u64;
    let h = f.spacing();
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache: Vec<(u64, Vec<[i64; 2]>)> = Vec::new();
    let mut dirs_for = |m: u64| -> Vec<[i64; 2]> {
        if let Some((_, d)) = cache.iter().find(|(k, _)| *k == m) {
            return d.clone();
        }
        let d = lattice_directions(n, m, directions);
        cache.push((m, d.clone()));
        d
    };
    let mut max_ratio = 0.0f64;
    let mut pairs = 0;
    while pairs < sample_count {
        let m = log_uniform(&mut rng, 2, side / 4);
        let kind = rng.gen_range(0..3);
        let m2 = if kind == 1 {
            m
        } else {
            let lo = m / 2 + 1;
            let hi = (2 * m - 1).min(side / 2);
            if rng.gen::<bool>() {
                log_uniform(&mut rng, m, hi)
            } else {
                m + lo - log_uniform(&mut rng, lo, m)
            }
        };
        let max_shift = if s < 1.0 { side / 2 } else { (m - 1) / 2 };
        let shift = if kind == 0 || max_shift == 0 { 0 } else { log_uniform(&mut rng, 1, max_shift) };
        let x = [rng.gen_range(0..side) as i64, if n == 2 { rng.gen_range(0..side) as i64 } else { 0 }];
        let dx = if n == 1 {
            let sign = if rng.gen::<bool>() { 1 } else { -1 };
            [sign * shift as i64, 0]
        } else {
            let a: f64 = rng.gen_range(0.0..2.0 * PI);
            [round(shift as f64 * cos(a)) as i64, round(shift as f64 * sin(a)) as i64]
        };
        let dist = sqrt((dx[0] * dx[0] + dx[1] * dx[1]) as f64) * h;
        if s == 1.0 && dist >= m as f64 * h / 2.0 {
            continue;
        }
        if dist == 0.0 && m == m2 {
            continue;
        }
        let x2 = [x[0] + dx[0], x[1] + dx[1]];
        let a = lat.second_difference(x, &dirs_for(m));
        let b = lat.second_difference(x2, &dirs_for(m2));
        let y = m as f64 * h;
        let dy = (m2 as f64 - m as f64).abs() * h;
        let ratio = (a - b).abs() / (norm * modulus(s, dist, dy, y));
        max_ratio = max_ratio.max(ratio);
        pairs += 1;
    }
    Ok(ContinuityReport {
        s,
        pairs,
        norm,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{parse_function_spec, synthesize};
    use crate::math::TAU;
    use proptest::prelude::*;

    fn synth(text: &str, n: usize, depth: u32) -> GridFunction {
        synthesize(&parse_function_spec(text).unwrap(), n, depth).unwrap()
    }

    #[test]
    fn constants_are_annihilated() {
        let f = GridFunction::constant(2, 6, 4.0).unwrap();
        for m in [1, 3, 17] {
            assert_eq!(second_difference(&f, [5, 9], m, 8).unwrap(), 0.0);
        }
        assert_eq!(holder_seminorm(&f, 0.5).unwrap(), 0.0);
        assert!(second_difference(&f, [0, 0], 0, 8).is_err());
    }

    #[test]
    fn cosine_closed_form() {
        let f = synth("trig k=1 a=1", 1, 10);
        let v = second_difference(&f, [0, 0], 512, 1).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
        // brute force over the dyadic probes: 2(1 − cos 2πy)/y peaks at y = 1/2
        let brute = (1..10)
            .map(|j| {
                let y = crate::math::exp2i(-j);
                2.0 * (1.0 - cos(TAU * y)) / y
            })
            .fold(0.0f64, f64::max);
        let got = holder_seminorm(&f, 1.0).unwrap();
        assert!((got - brute).abs() < 1e-12 && (got - 8.0).abs() < 1e-12);
    }

    #[test]
    fn weierstrass_matches_term_by_term() {
        let depth = 12;
        let levels = 8;
        let f = synth("weierstrass s=1 levels=8", 1, depth);
        let n = (1u64 << depth) as f64;
        for (x, m) in [(0i64, 1u64), (37, 5), (1000, 64), (4095, 700)] {
            // each term 2^{-j} cos(2π 2^j t) has second difference 2^{-j}·cos(2π2^j x)·2(cos(2π2^j y) − 1)
            let xs = x as f64 / n;
            let ys = m as f64 / n;
            let direct: f64 = (0..=levels)
                .map(|j| {
                    let w = (1u64 << j) as f64;
                    (1.0 / w) * cos(TAU * w * xs) * 2.0 * (cos(TAU * w * ys) - 1.0)
                })
                .sum();
            let got = second_difference(&f, [x, 0], m, 1).unwrap();
            assert!((got - direct.abs()).abs() < 1e-9, "x={x} m={m}");
        }
    }

    #[test]
    fn directions_are_near_isotropic() {
        for m in [8u64, 33, 100] {
            let dirs = lattice_directions(2, m, 8);
            assert!(dirs.len() >= 4);
            for d in &dirs {
                let norm = sqrt((d[0] * d[0] + d[1] * d[1]) as f64);
                assert!((norm - m as f64).abs() <= 0.02 * m as f64);
            }
        }
        assert_eq!(lattice_directions(2, 1, 8), alloc::vec![[1, 0], [0, 1]]);
        assert_eq!(lattice_directions(1, 7, 8), alloc::vec![[7, 0]]);
    }

    #[test]
    fn even_in_h() {
        let f = synth("lacunary-random s=0.5 levels=6 seed=4", 1, 9);
        let lat = Lattice::new(&f);
        for x in [0i64, 17, 300] {
            for m in [1i64, 9, 100] {
                assert_eq!(lat.second_difference([x, 0], &[[m, 0]]), lat.second_difference([x, 0], &[[-m, 0]]));
            }
        }
    }

    #[test]
    fn report_refines_upward() {
        let f = synth("weierstrass s=0.5 levels=6", 1, 10);
        let r = holder_report(&f, 0.5, 1).unwrap();
        assert!(r.refined >= r.value);
        assert!((0.0..1.0).contains(&r.resolution_bias));
        assert_eq!(r.value, holder_seminorm(&f, 0.5).unwrap());
    }

    #[test]
    fn field_and_sets() {
        let f = synth("weierstrass s=0.5 levels=8", 1, 12);
        let field = second_difference_field(&f, 0.5, 10, ProbeConfig::default()).unwrap();
        let above = holder_seminorm(&f, 0.5).unwrap().max(field.max()) * 1.0001;
        assert!(field.threshold(above).is_empty());
        assert!(build_s(&f, 0.5, f64::INFINITY, 10, 8).unwrap().is_empty());
        let half_median = 0.5 * field.median();
        let s_set = field.threshold(half_median);
        for j in 0..=10 {
            assert!(s_set.level_count(j) > 0, "level {j} empty");
        }
        let c = crate::dyadic::carleson_sup(&s_set, 5..=10, 0.1).unwrap();
        assert!(c.diverging);
        assert!(second_difference_field(&f, 0.5, 11, ProbeConfig::default()).is_err());
        // at ε = 0 every cell whose probes see any variation is kept
        let all = field.threshold(0.0);
        assert_eq!(all.len(), HalfSpaceSet::full(1, 10).len());
    }

    #[test]
    fn continuity_cosine() {
        let f = synth("trig k=1 a=1", 1, 12);
        let r = continuity_check(&f, 1.0, 10_000, 3, 1).unwrap();
        assert!(r.max_ratio.is_finite() && r.max_ratio <= 50.0, "{}", r.max_ratio);
        let c = GridFunction::constant(1, 8, 2.0).unwrap();
        assert_eq!(continuity_check(&c, 0.5, 100, 1, 1).unwrap().max_ratio, 0.0);
        let z = GridFunction::constant(1, 8, 0.0).unwrap();
        assert!(continuity_check(&z, 0.5, 100, 1, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn build_s_monotone_and_covariant(seed in 0u64..500, a in 0.0f64..3.0, b in 0.0f64..3.0, lambda in 0.1f64..5.0) {
            let f = synth(&alloc::format!("lacunary-random s=0.7 levels=6 seed={seed}"), 1, 9);
            let field = second_difference_field(&f, 0.7, 7, ProbeConfig::default()).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(field.threshold(hi).is_subset(&field.threshold(lo)));
            let g = f.scale(lambda);
            let scaled = second_difference_field(&g, 0.7, 7, ProbeConfig::default()).unwrap();
            let hs = holder_seminorm(&g, 0.7).unwrap();
            let h = holder_seminorm(&f, 0.7).unwrap();
            prop_assert!((hs - lambda * h).abs() <= 1e-12 * hs.max(1.0));
            // thresholds away from the field values so rounding cannot flip a cell
            let eps = lo * h;
            let close = field.entries().any(|(_, _, v)| (v - eps).abs() <= 1e-9 * (1.0 + v));
            if !close {
                prop_assert_eq!(scaled.threshold(lambda * eps), field.threshold(eps));
            }
        }

        #[test]
        fn seminorm_subadditive(s1 in 0u64..100, s2 in 0u64..100) {
            let f = synth(&alloc::format!("lacunary-random s=0.5 levels=5 seed={s1}"), 1, 8);
            let g = synth(&alloc::format!("lacunary-random s=0.5 levels=5 seed={s2}"), 1, 8);
            let sum = holder_seminorm(&f.add(&g).unwrap(), 0.5).unwrap();
            prop_assert!(sum <= holder_seminorm(&f, 0.5).unwrap() + holder_seminorm(&g, 0.5).unwrap() + 1e-12);
        }
    }
}
