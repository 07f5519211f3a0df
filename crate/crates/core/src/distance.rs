//! Critical thresholds `ε₀` of the three bad-set constructions, their
//! cross-method comparison, empirical inclusion probes between the sets and
//! the truncation-projection witness.
//!
//! All three methods reduce to a [`CellField`]: the set at threshold `ε` is
//! `field.threshold(ε)`, so a bisection only rethresholds one precomputed field.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;

use crate::dyadic::{carleson_sup, CarlesonReport, CellField, HalfSpaceSet, ProximityField};
use crate::gridfn::{sup_norm, GridFunction};
use crate::math::{exp2i, log2, ls_slope};
use crate::poisson::derivative_field;
use crate::secdiff::{check_exponent, holder_seminorm_with, second_difference_field, ProbeConfig};
use crate::wavelet::{
    analyze, filter_bank, jbmo_box_sums, level_weight, lip_wavelet_norm, lip_wavelet_seminorm, truncate_projection,
    WaveletCoefficients, DEFAULT_VANISHING_MOMENTS,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// `S(s,f,ε)` from second differences.
    SecDiff,
    /// `T(s,f,ε)` from wavelet coefficients.
    Wavelet,
    /// `D(s,f,ε)` from the Poisson extension.
    Poisson,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SecDiff, Method::Wavelet, Method::Poisson];

    pub fn name(self) -> &'static str {
        match self {
            Method::SecDiff => "secdiff",
            Method::Wavelet => "wavelet",
            Method::Poisson => "poisson",
        }
    }

    pub fn parse(text: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == text)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Settings shared by every threshold estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    /// Depths over which `M_J` is tracked; the sets are built to `j_range.end()`.
    pub j_range: RangeInclusive<u32>,
    pub theta: f64,
    pub wavelet_p: usize,
    pub probes: ProbeConfig,
    pub iterations: u32,
    /// Minimum decay, in `log2` units per level, of the field's level sups over
    /// the tail of `j_range` for which `ε₀` is reported as 0. `None` disables
    /// the guard.
    pub tail_decay: Option<f64>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            j_range: 7..=14,
            theta: 0.1,
            wavelet_p: DEFAULT_VANISHING_MOMENTS,
            probes: ProbeConfig::default(),
            iterations: 20,
            tail_decay: Some(0.75),
        }
    }
}

impl EstimateConfig {
    fn j_max(&self) -> u32 {
        *self.j_range.end()
    }
}

/// A method's field together with its upper threshold `ε_hi`, above which the
/// set is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodField {
    pub method: Method,
    pub s: f64,
    pub field: CellField,
    pub eps_hi: f64,
    /// Filter bank name for the wavelet method.
    pub bank: Option<String>,
}

impl MethodField {
    pub fn set(&self, eps: f64) -> HalfSpaceSet {
        self.field.threshold(eps)
    }
}

/// `level_weight(j)·max_l|c_{(l,j,k)}|` for levels `0..=j_max`.
pub fn wavelet_field(coeffs: &WaveletCoefficients, s: f64, j_max: u32) -> Result<CellField> {
    if j_max >= coeffs.depth() {
        return Err(Error::range(
            "J_max",
            alloc::format!("J_max = {j_max} needs J_max < J_grid = {}", coeffs.depth()),
        ));
    }
    let levels = (0..=j_max)
        .map(|j| {
            let w = level_weight(coeffs.n(), j, s);
            coeffs.level_max(j).into_iter().map(|m| w * m).collect()
        })
        .collect();
    CellField::from_levels(coeffs.n(), levels)
}

/// Relative to `‖f‖_∞`, the size below which `ε_hi` is treated as 0.
pub const NOISE_FLOOR: f64 = 1e-10;

/// Builds the field of `method` to depth `config.j_range.end()`.
///
/// `ε_hi` is `max(holder seminorm, field max)` for second differences, the
/// wavelet seminorm `‖c(f)‖_s` for wavelets and the field max for Poisson.
pub fn method_field(f: &GridFunction, s: f64, method: Method, config: &EstimateConfig) -> Result<MethodField> {
    check_exponent(s)?;
    let j_max = config.j_max();
    let (field, eps_hi, bank) = match method {
        Method::SecDiff => {
            let field = second_difference_field(f, s, j_max, config.probes)?;
            let hi = holder_seminorm_with(f, s, config.probes.directions)?.max(field.max());
            (field, hi, None)
        }
        Method::Wavelet => {
            let bank = filter_bank(config.wavelet_p)?;
            let coeffs = analyze(f, &bank)?;
            let field = wavelet_field(&coeffs, s, j_max)?;
            let hi = lip_wavelet_seminorm(&coeffs, s).max(field.max());
            (field, hi, Some(bank.name()))
        }
        Method::Poisson => {
            let field = derivative_field(f, s, j_max)?;
            let hi = field.max();
            (field, hi, None)
        }
    };
    // Fields of (numerically) constant functions are rounding noise.
    let eps_hi = if eps_hi <= NOISE_FLOOR * sup_norm(f) { 0.0 } else { eps_hi };
    Ok(MethodField {
        method,
        s,
        field,
        eps_hi,
        bank,
    })
}

/// One evaluation of the divergence criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub eps: f64,
    pub cells: usize,
    pub report: CarlesonReport,
}

/// Result of [`epsilon_star`].
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceEstimate {
    pub method: Method,
    pub s: f64,
    pub eps_star: f64,
    /// `(ε_lo, ε_hi)`: diverging (or 0) and non-diverging ends.
    pub bracket: (f64, f64),
    /// `ε_hi·2^{−iterations}`.
    pub resolution: f64,
    pub iterations: u32,
    pub theta: f64,
    pub j_range: (u32, u32),
    /// Boundary found by bisection on the slope criterion alone.
    pub raw_eps_star: f64,
    /// Fitted `log2` slope of the field's level sups over the tail of `j_range`.
    pub tail_slope: f64,
    /// The tail guard set `ε₀ = 0`.
    pub tail_guard: bool,
    /// Bisection evaluations in order.
    pub trace: Vec<Probe>,
    /// Evaluations at `ε_hi·2^{−k}`, `k = 0..=iterations`, descending in `ε`.
    pub scan: Vec<Probe>,
    /// Divergence flips along `scan`; a monotone criterion flips at most once.
    pub sign_changes: usize,
    pub bank: Option<String>,
}

impl DistanceEstimate {
    pub fn monotone(&self) -> bool {
        self.sign_changes <= 1
    }

    /// `ε₀` below the bracket resolution.
    pub fn is_zero(&self) -> bool {
        self.eps_star == 0.0 || self.eps_star < self.resolution
    }
}

fn evaluate(field: &MethodField, eps: f64, config: &EstimateConfig) -> Result<Probe> {
    let set = field.set(eps);
    let report = carleson_sup(&set, config.j_range.clone(), config.theta)?;
    Ok(Probe {
        eps,
        cells: set.len(),
        report,
    })
}

/// `log2` slope of the level sups over the deepest half of `j_range`; levels
/// whose sup is below `floor` count as having decayed completely.
fn tail_slope(field: &CellField, range: &RangeInclusive<u32>, floor: f64) -> f64 {
    let depths: Vec<u32> = range.clone().collect();
    let tail = &depths[depths.len() - depths.len().div_ceil(2)..];
    let sups = field.level_sups();
    if tail.iter().all(|&j| sups[j as usize] <= floor) {
        return f64::NEG_INFINITY;
    }
    if tail.len() < 2 {
        return 0.0;
    }
    let xs: Vec<f64> = tail.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = tail.iter().map(|&j| log2(sups[j as usize].max(floor))).collect();
    ls_slope(&xs, &ys)
}

/// `ε₀` of one method for a prebuilt field.
pub fn epsilon_star_for(field: &MethodField, config: &EstimateConfig) -> Result<DistanceEstimate> {
    let (lo_d, hi_d) = (*config.j_range.start(), config.j_max());
    if lo_d > hi_d || hi_d > field.field.j_max() {
        return Err(Error::range(
            "J_range",
            alloc::format!("{:?} not inside the field's levels 0..={}", config.j_range, field.field.j_max()),
        ));
    }
    let eps_hi = field.eps_hi;
    let resolution = eps_hi * exp2i(-(config.iterations as i32));
    let mut estimate = DistanceEstimate {
        method: field.method,
        s: field.s,
        eps_star: 0.0,
        bracket: (0.0, eps_hi),
        resolution,
        iterations: config.iterations,
        theta: config.theta,
        j_range: (lo_d, hi_d),
        raw_eps_star: 0.0,
        tail_slope: f64::NEG_INFINITY,
        tail_guard: false,
        trace: Vec::new(),
        scan: Vec::new(),
        sign_changes: 0,
        bank: field.bank.clone(),
    };
    if eps_hi == 0.0 {
        return Ok(estimate);
    }

    let (mut lo, mut hi) = (0.0f64, eps_hi);
    for _ in 0..config.iterations {
        let mid = 0.5 * (lo + hi);
        let probe = evaluate(field, mid, config)?;
        if probe.report.diverging {
            lo = mid;
        } else {
            hi = mid;
        }
        estimate.trace.push(probe);
    }
    estimate.raw_eps_star = if lo == 0.0 { 0.0 } else { 0.5 * (lo + hi) };

    for k in 0..=config.iterations {
        estimate.scan.push(evaluate(field, eps_hi * exp2i(-(k as i32)), config)?);
    }
    estimate.sign_changes = estimate
        .scan
        .windows(2)
        .filter(|w| w[0].report.diverging != w[1].report.diverging)
        .count();

    estimate.tail_slope = tail_slope(&field.field, &config.j_range, resolution);
    estimate.tail_guard = config.tail_decay.is_some_and(|gamma| estimate.tail_slope <= -gamma);
    if estimate.tail_guard {
        estimate.bracket = (0.0, hi);
    } else {
        estimate.bracket = (lo, hi);
        estimate.eps_star = estimate.raw_eps_star;
    }
    Ok(estimate)
}

/// `ε₀ = inf{ε : the method's set at ε has a non-diverging Carleson profile}`,
/// by bisection on `[0, ε_hi]`.
pub fn epsilon_star(f: &GridFunction, s: f64, method: Method, config: &EstimateConfig) -> Result<DistanceEstimate> {
    epsilon_star_for(&method_field(f, s, method, config)?, config)
}

/// `ε₀(a)/ε₀(b)`, with `1` when both are below resolution.
fn ratio(a: &DistanceEstimate, b: &DistanceEstimate) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 1.0,
        (false, true) => f64::INFINITY,
        (true, false) => 0.0,
        (false, false) => a.eps_star / b.eps_star,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRatio {
    pub a: Method,
    pub b: Method,
    pub ratio: f64,
    pub within_band: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub estimates: Vec<DistanceEstimate>,
    pub ratios: Vec<MethodRatio>,
    pub band: f64,
}

impl Comparison {
    pub fn within_band(&self) -> bool {
        self.ratios.iter().all(|r| r.within_band)
    }

    pub fn estimate(&self, method: Method) -> Option<&DistanceEstimate> {
        self.estimates.iter().find(|e| e.method == method)
    }
}

pub const DEFAULT_BAND: f64 = 32.0;

/// Pairwise ratios of prebuilt estimates, flagged against `[1/band, band]`.
pub fn compare_estimates(estimates: Vec<DistanceEstimate>, band: f64) -> Comparison {
    let mut ratios = Vec::new();
    for i in 0..estimates.len() {
        for j in i + 1..estimates.len() {
            let r = ratio(&estimates[i], &estimates[j]);
            ratios.push(MethodRatio {
                a: estimates[i].method,
                b: estimates[j].method,
                ratio: r,
                within_band: r >= 1.0 / band && r <= band,
            });
        }
    }
    Comparison {
        estimates,
        ratios,
        band,
    }
}

/// `ε₀` under all three methods and their pairwise ratios.
pub fn compare_methods(f: &GridFunction, s: f64, config: &EstimateConfig, band: f64) -> Result<Comparison> {
    let estimates = Method::ALL
        .into_iter()
        .map(|m| epsilon_star(f, s, m, config))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_estimates(estimates, band))
}

/// Contained-cell fraction of `source` in `enlarge(target(c·ε_target), R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionCell {
    pub c: f64,
    pub r: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    pub source: String,
    pub target: String,
    pub eps_source: f64,
    pub eps_target: f64,
    pub source_cells: usize,
    pub eta: f64,
    pub grid: Vec<InclusionCell>,
    /// Smallest `R`, then largest `c`, reaching `fraction ≥ η`.
    pub achieved: Option<(f64, f64)>,
}

/// Scans `(c, R)` for `source ⊆ target(c·ε_target)_R`.
///
/// The fields carry their own scales, so the source threshold and the target's
/// reference threshold are given separately; `c` multiplies the latter.
#[allow(clippy::too_many_arguments)]
pub fn inclusion_probe(
    source: &MethodField,
    eps_source: f64,
    target: &MethodField,
    eps_target: f64,
    c_grid: &[f64],
    r_grid: &[f64],
    eta: f64,
) -> Result<InclusionReport> {
    if c_grid.iter().any(|c| !(*c > 0.0 && *c <= 1.0)) {
        return Err(Error::range("c grid", "need 0 < c ≤ 1"));
    }
    if r_grid.iter().any(|r| !(0.0..=5.0).contains(r)) {
        return Err(Error::range("R grid", "need 0 ≤ R ≤ 5"));
    }
    let j_max = source.field.j_max().min(target.field.j_max());
    let src = source.field.threshold_to(eps_source, j_max);
    let count = src.len();
    let r_max = r_grid.iter().fold(0.0f64, |m, &r| m.max(r));
    let mut grid = Vec::new();
    for &c in c_grid {
        let tgt = target.field.threshold_to(c * eps_target, j_max);
        let prox = (count > 0).then(|| ProximityField::for_radius(&tgt, r_max));
        for &r in r_grid {
            let fraction = match &prox {
                None => 1.0,
                Some(p) => {
                    let big = p.enlarged(r);
                    src.cells().filter(|q| big.contains(q)).count() as f64 / count as f64
                }
            };
            grid.push(InclusionCell { c, r, fraction });
        }
    }
    let achieved = grid
        .iter()
        .filter(|g| g.fraction >= eta)
        .min_by(|a, b| a.r.total_cmp(&b.r).then(b.c.total_cmp(&a.c)))
        .map(|g| (g.c, g.r));
    Ok(InclusionReport {
        source: source.method.name().into(),
        target: target.method.name().into(),
        eps_source,
        eps_target,
        source_cells: count,
        eta,
        grid,
        achieved,
    })
}

/// Checks on `g = truncate_projection(f, s, ε)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionWitness {
    pub s: f64,
    pub eps: f64,
    /// `lip_wavelet_norm(f − g, s)`.
    pub residual: f64,
    pub residual_ok: bool,
    /// Number of cubes whose box sum was checked.
    pub cubes: usize,
    /// Largest `(box sum of g) / bound` over cubes with a nonzero bound.
    pub worst_ratio: f64,
    /// Every cube satisfied `box_g(Q) ≤ ‖c(f)‖_s²·(2^n − 1)·Σ_{P⊆Q, P∈T}|P|/|Q|`.
    pub box_ok: bool,
    pub kept_cells: usize,
}

/// Verifies `‖c(f) − c(g)‖_s ≤ ε` and the box-sum bound for every cube: each
/// kept atom over `P` has `4^{|P|s} c² ≤ ‖c(f)‖_s² |P|`, and a cube carries at
/// most `2^n − 1` atoms.
pub fn projection_distance_witness(coeffs: &WaveletCoefficients, s: f64, eps: f64) -> Result<ProjectionWitness> {
    check_exponent(s)?;
    if !(eps >= 0.0) {
        return Err(Error::range("ε", "need ε ≥ 0"));
    }
    let n = coeffs.n();
    let depth = coeffs.depth();
    let g = truncate_projection(coeffs, s, eps);
    let residual = lip_wavelet_norm(&coeffs.sub(&g)?, s);
    let norm = lip_wavelet_seminorm(coeffs, s);
    let t = wavelet_field(coeffs, s, depth - 1)?.threshold(eps);
    let boxes = jbmo_box_sums(&g, s);

    // Σ_{P⊆Q, P∈T} |P| / |Q|, bottom-up.
    let mut density: Vec<Vec<f64>> = Vec::with_capacity(depth as usize);
    for j in (0..depth).rev() {
        let side = 1usize << j;
        let fine = 2 * side;
        let below = density.last();
        let row: Vec<f64> = t
            .level(j)
            .iter()
            .enumerate()
            .map(|(flat, &inside)| {
                let kids = match below {
                    None => 0.0,
                    Some(b) if n == 1 => b[2 * flat] + b[2 * flat + 1],
                    Some(b) => {
                        let (i0, i1) = (flat % side, flat / side);
                        let base = 2 * i1 * fine + 2 * i0;
                        b[base] + b[base + 1] + b[base + fine] + b[base + fine + 1]
                    }
                };
                f64::from(u8::from(inside)) + exp2i(-(n as i32)) * kids
            })
            .collect();
        density.push(row);
    }
    density.reverse();

    let scale = norm * norm * ((1usize << n) - 1) as f64;
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut cubes = 0;
    for (lhs_row, rhs_row) in boxes.iter().zip(&density) {
        for (&lhs, &d) in lhs_row.iter().zip(rhs_row) {
            let rhs = scale * d;
            cubes += 1;
            if lhs > rhs * (1.0 + 1e-12) + 1e-300 {
                ok = false;
            }
            if rhs > 0.0 {
                worst = worst.max(lhs / rhs);
            }
        }
    }
    Ok(ProjectionWitness {
        s,
        eps,
        residual,
        residual_ok: residual <= eps,
        cubes,
        worst_ratio: worst,
        box_ok: ok,
        kept_cells: t.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{carleson_box_value, DyadicCube};
    use crate::gridfn::{parse_function_spec, synthesize};
    use crate::math::LN_2;
    use proptest::prelude::*;

    fn synth(text: &str, n: usize, depth: u32) -> GridFunction {
        synthesize(&parse_function_spec(text).unwrap(), n, depth).unwrap()
    }

    fn small() -> EstimateConfig {
        EstimateConfig {
            j_range: 4..=8,
            ..EstimateConfig::default()
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::parse(m.name()), Some(m));
        }
        assert_eq!(Method::parse("bogus"), None);
    }

    #[test]
    fn constant_has_zero_threshold() {
        let c = GridFunction::constant(1, 10, 1.5).unwrap();
        for m in Method::ALL {
            let e = epsilon_star(&c, 0.5, m, &small()).unwrap();
            assert!(e.is_zero(), "{m}");
        }
    }

    #[test]
    fn trig_is_below_resolution() {
        let f = synth("trig k=3 a=1", 1, 10);
        for m in Method::ALL {
            let e = epsilon_star(&f, 1.0, m, &small()).unwrap();
            assert!(e.eps_star <= exp2i(-10) * e.bracket.1.max(e.resolution * 1e6), "{m}: {e:?}");
            assert!(e.tail_guard || e.is_zero(), "{m}");
        }
    }

    #[test]
    fn atom_is_zero() {
        let f = synth("wavelet-atom l=1 j=3 k=2", 1, 10);
        for m in Method::ALL {
            let e = epsilon_star(&f, 0.5, m, &small()).unwrap();
            assert!(e.is_zero(), "{m}: {}", e.eps_star);
        }
    }

    #[test]
    fn weierstrass_is_separated() {
        let f = synth("weierstrass s=1 levels=9", 1, 11);
        let cfg = EstimateConfig {
            j_range: 4..=9,
            ..EstimateConfig::default()
        };
        let cmp = compare_methods(&f, 1.0, &cfg, DEFAULT_BAND).unwrap();
        for e in &cmp.estimates {
            let hi = method_field(&f, 1.0, e.method, &cfg).unwrap().eps_hi;
            assert!(e.eps_star > 0.05 * hi, "{}: {} vs {hi}", e.method, e.eps_star);
            assert!(!e.tail_guard);
            let (lo, hi) = e.bracket;
            assert!(lo <= e.eps_star && e.eps_star <= hi);
        }
        assert!(cmp.within_band(), "{:?}", cmp.ratios);
    }

    #[test]
    fn bracket_ends_behave() {
        let f = synth("weierstrass s=0.5 levels=8", 1, 10);
        let cfg = small();
        let field = method_field(&f, 0.5, Method::SecDiff, &cfg).unwrap();
        let e = epsilon_star_for(&field, &cfg).unwrap();
        let at = |eps: f64| evaluate(&field, eps, &cfg).unwrap().report.diverging;
        assert!(!at(e.bracket.1));
        assert!(e.bracket.0 == 0.0 || at(e.bracket.0));
        assert!(field.set(field.eps_hi).is_empty());
        assert_eq!(e.trace.len(), 20);
    }

    #[test]
    fn ratio_conventions() {
        let atom = synth("wavelet-atom l=1 j=2 k=1", 1, 10);
        let cmp = compare_methods(&atom, 0.5, &small(), DEFAULT_BAND).unwrap();
        assert!(cmp.ratios.iter().all(|r| r.ratio == 1.0));
        assert_eq!(cmp.ratios.len(), 3);
    }

    #[test]
    fn scaling_by_two_is_exact() {
        let f = synth("weierstrass s=0.5 levels=8", 1, 10);
        let cfg = small();
        for m in Method::ALL {
            let a = epsilon_star(&f, 0.5, m, &cfg).unwrap();
            let b = epsilon_star(&f.scale(2.0), 0.5, m, &cfg).unwrap();
            assert_eq!(2.0 * a.eps_star, b.eps_star, "{m}");
        }
    }

    #[test]
    fn inclusion_trivial_cases() {
        let f = synth("weierstrass s=1 levels=8", 1, 10);
        let cfg = small();
        let t = method_field(&f, 1.0, Method::Wavelet, &cfg).unwrap();
        let empty = inclusion_probe(&t, 2.0 * t.eps_hi, &t, t.eps_hi, &[1.0], &[0.5], 0.99).unwrap();
        assert_eq!(empty.source_cells, 0);
        assert!(empty.grid.iter().all(|g| g.fraction == 1.0));
        let eps = 0.3 * t.eps_hi;
        let own = inclusion_probe(&t, eps, &t, eps, &[1.0, 0.5], &[0.0, 1.0], 0.99).unwrap();
        assert!(own.grid.iter().all(|g| g.fraction == 1.0));
        assert_eq!(own.achieved, Some((1.0, 0.0)));
        assert!(inclusion_probe(&t, eps, &t, eps, &[1.5], &[0.0], 0.99).is_err());
        assert!(inclusion_probe(&t, eps, &t, eps, &[1.0], &[6.0], 0.99).is_err());
    }

    #[test]
    fn inclusion_monotone_in_c_and_r() {
        let f = synth("weierstrass s=1 levels=8", 1, 10);
        let cfg = small();
        let s = method_field(&f, 1.0, Method::SecDiff, &cfg).unwrap();
        let t = method_field(&f, 1.0, Method::Wavelet, &cfg).unwrap();
        let cs = [1.0, 0.5, 0.25, 0.125];
        let rs = [0.5, 1.0, 2.0, 4.0];
        let rep = inclusion_probe(&t, 0.5 * t.eps_hi, &s, 0.5 * s.eps_hi, &cs, &rs, 0.99).unwrap();
        for (i, a) in rep.grid.iter().enumerate() {
            assert!((0.0..=1.0).contains(&a.fraction));
            for b in &rep.grid[i + 1..] {
                if b.c <= a.c && b.r >= a.r {
                    assert!(b.fraction >= a.fraction);
                }
            }
        }
    }

    #[test]
    fn witness_extremes_and_oracle() {
        let f = synth("weierstrass s=1 levels=8", 1, 10);
        let bank = filter_bank(4).unwrap();
        let c = analyze(&f, &bank).unwrap();
        let norm = lip_wavelet_seminorm(&c, 1.0);
        let zero = projection_distance_witness(&c, 1.0, 0.0).unwrap();
        assert_eq!(zero.residual, 0.0);
        assert!(zero.box_ok);
        let top = projection_distance_witness(&c, 1.0, norm).unwrap();
        assert_eq!(top.kept_cells, 0);
        assert!(top.residual_ok && top.box_ok);
        let mid = projection_distance_witness(&c, 1.0, 0.5 * norm).unwrap();
        assert!(mid.residual_ok && mid.box_ok && mid.worst_ratio <= 1.0);

        // the bound's density term agrees with the Carleson box value
        let t = wavelet_field(&c, 1.0, 9).unwrap().threshold(0.5 * norm);
        let g = truncate_projection(&c, 1.0, 0.5 * norm);
        let boxes = jbmo_box_sums(&g, 1.0);
        for (j, flat) in [(0u32, 0usize), (2, 1), (5, 17)] {
            let q = DyadicCube::from_flat(1, j, flat);
            let bound = norm * norm * carleson_box_value(&t, &q) / LN_2;
            assert!(boxes[j as usize][flat] <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn witness_in_two_dimensions() {
        let f = synth("lacunary-random s=0.5 levels=5 seed=3", 2, 7);
        let c = analyze(&f, &filter_bank(2).unwrap()).unwrap();
        let norm = lip_wavelet_seminorm(&c, 0.5);
        for frac in [0.25, 0.5, 0.75] {
            let w = projection_distance_witness(&c, 0.5, frac * norm).unwrap();
            assert!(w.residual_ok && w.box_ok, "{w:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn witness_holds_for_random_eps(seed in 0u64..1000, frac in 0.0f64..1.2) {
            let f = synth(&alloc::format!("lacunary-random s=0.5 levels=7 seed={seed}"), 1, 10);
            let c = analyze(&f, &filter_bank(8).unwrap()).unwrap();
            let eps = frac * lip_wavelet_seminorm(&c, 0.5);
            let w = projection_distance_witness(&c, 0.5, eps).unwrap();
            prop_assert!(w.residual_ok);
            prop_assert!(w.box_ok);
        }
    }
}
