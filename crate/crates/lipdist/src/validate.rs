//! The acceptance suite, shared by `lipdist validate` and the `acceptance` test.
//!
//! Each criterion fixes its own grids; the run configuration supplies the
//! tunables (θ, filter bank, probes, pair counts, seeds, comparability band).

use std::time::Instant;

use lipdist_core::distance::{
    compare_estimates, epsilon_star_for, inclusion_probe, method_field, projection_distance_witness, DistanceEstimate,
    EstimateConfig, Method, MethodField,
};
use lipdist_core::dyadic::{carleson_sup, HalfSpaceSet, ProximityField};
use lipdist_core::gridfn::{parse_function_spec, sup_norm, synthesize_with, SynthOptions};
use lipdist_core::poisson::{d2y_extension, holder_poisson_norm, jbmo_direct_norm, lipschitz_check, poisson_extend};
use lipdist_core::secdiff::{continuity_check, holder_seminorm_with};
use lipdist_core::wavelet::{
    analyze, filter_bank, jbmo_wavelet_norm, lip_wavelet_norm, lip_wavelet_seminorm, reconstruct,
};
use lipdist_core::GridFunction;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::corpus::{corpus, Class, Entry};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub observed: String,
    pub expected: String,
    /// Failures and recorded constants, one line each.
    pub details: Vec<String>,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  observed: {}  expected: {}  ({:.1}s)",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.observed,
            self.expected,
            self.seconds
        )
    }
}

/// Tunables taken from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct Settings {
    pub theta: f64,
    pub wavelet_p: usize,
    pub directions: usize,
    pub probes_per_cell: usize,
    pub pairs: usize,
    pub seed: u64,
    pub band: f64,
    pub tail_decay: Option<f64>,
}

impl From<&RunConfig> for Settings {
    fn from(c: &RunConfig) -> Self {
        Settings {
            theta: c.theta,
            wavelet_p: c.wavelet_p,
            directions: c.directions,
            probes_per_cell: c.probes_per_cell,
            pairs: c.pairs,
            seed: c.seed,
            band: c.band,
            tail_decay: (c.tail_decay > 0.0).then_some(c.tail_decay),
        }
    }
}

impl Default for Settings {
    fn default() -> Self {
        Settings::from(&RunConfig::default())
    }
}

impl Settings {
    fn estimate(&self, j_range: std::ops::RangeInclusive<u32>) -> EstimateConfig {
        let base = RunConfig {
            theta: self.theta,
            wavelet_p: self.wavelet_p,
            directions: self.directions,
            probes_per_cell: self.probes_per_cell,
            tail_decay: self.tail_decay.unwrap_or(0.0),
            ..RunConfig::default()
        };
        EstimateConfig {
            j_range,
            ..base.estimate()
        }
    }

    fn synth(&self, spec: &str, n: usize, depth: u32) -> GridFunction {
        let opts = SynthOptions {
            wavelet_p: self.wavelet_p,
            loader: None,
        };
        synthesize_with(&parse_function_spec(spec).expect("corpus spec parses"), n, depth, &opts)
            .expect("corpus spec synthesizes")
    }
}

/// Grid of the distance criteria: `J_grid = 16`, `J_range = [7, 14]`.
pub const DISTANCE_GRID: u32 = 16;
pub const DISTANCE_RANGE: (u32, u32) = (7, 14);

fn result(
    id: u8,
    name: &'static str,
    start: Instant,
    passed: bool,
    observed: String,
    expected: &str,
    details: Vec<String>,
) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        observed,
        expected: expected.into(),
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// `max(r, 1/r)`, with `0/0 = 1`.
fn spread(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else if a == 0.0 || b == 0.0 {
        f64::INFINITY
    } else {
        (a / b).max(b / a)
    }
}

pub fn carleson_exactness(_: &Settings) -> CriterionResult {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for j in 0..=14u32 {
        let set = HalfSpaceSet::full(1, j);
        let r = carleson_sup(&set, 0..=j, 0.1).expect("valid range");
        worst = worst.max((r.last() - (j + 1) as f64 * std::f64::consts::LN_2).abs());
    }
    let n1 = start.elapsed().as_secs_f64();
    for j in 0..=8u32 {
        let set = HalfSpaceSet::full(2, j);
        let r = carleson_sup(&set, 0..=j, 0.1).expect("valid range");
        worst = worst.max((r.last() - (j + 1) as f64 * std::f64::consts::LN_2).abs());
    }
    details.push(format!("n=1 stacks J=0..14 in {n1:.3}s; n=2 stacks J=0..8 also checked"));
    result(
        1,
        "Carleson engine exactness",
        start,
        worst <= 1e-12 && n1 < 1.0,
        format!("max |M_J − (J+1)log2| = {worst:.2e}, n=1 time {n1:.3}s"),
        "≤ 1e-12, < 1 s",
        details,
    )
}

pub fn wavelet_correctness(s: &Settings) -> CriterionResult {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let (mut rt, mut pv, mut vm) = (0.0f64, 0.0f64, 0.0f64);
    for p in [2, 8] {
        let bank = filter_bank(p).expect("bank");
        for seed in 0..20u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(seed));
            let samples = (0..1 << 12).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = GridFunction::new(1, 12, samples, "random").expect("grid");
            let c = analyze(&f, &bank).expect("analysis");
            let back = reconstruct(&c, &bank).expect("synthesis");
            let err = f.samples().iter().zip(back.samples()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            rt = rt.max(err / sup_norm(&f));
            pv = pv.max((c.energy() - f.l2_norm_sq()).abs() / f.l2_norm_sq());
        }
        for (n, depth) in [(1, 12), (2, 7)] {
            let c = analyze(&GridFunction::constant(n, depth, 2.5).expect("grid"), &bank).expect("analysis");
            vm = vm.max(c.iter().fold(0.0f64, |m, (.., v)| m.max(v.abs())));
        }
    }
    result(
        2,
        "wavelet correctness",
        start,
        rt <= 1e-10 && pv <= 1e-10 && vm <= 1e-10,
        format!("round trip {rt:.1e}, Parseval {pv:.1e}, constant |c| {vm:.1e}"),
        "each ≤ 1e-10",
        vec!["20 seeded random functions at J_grid=12, banks db2 and db8".into()],
    )
}

pub fn poisson_correctness(_: &Settings) -> CriterionResult {
    let start = Instant::now();
    let tau = std::f64::consts::TAU;
    let f = GridFunction::from_fn(1, 10, "cos", |x| (tau * x[0]).cos()).expect("grid");
    let mut closed = 0.0f64;
    for y in [0.01, 0.1, 0.5, 1.0] {
        let u = poisson_extend(&f, y).expect("y > 0");
        let d = d2y_extension(&f, y).expect("y > 0");
        for (i, (a, b)) in u.samples().iter().zip(d.samples()).enumerate() {
            let c = (tau * i as f64 / 1024.0).cos();
            closed = closed.max((a - (-tau * y).exp() * c).abs());
            closed = closed.max((b - tau * tau * (-tau * y).exp() * c).abs());
        }
    }
    let w = GridFunction::from_fn(1, 10, "mix", |x| {
        (tau * 3.0 * x[0]).sin() + 0.5 * (tau * 40.0 * x[0]).cos() + (x[0] - 0.5).abs()
    })
    .expect("grid");
    let mut semigroup = 0.0f64;
    for (a, b) in [(0.01, 0.03), (0.002, 0.2)] {
        let two = poisson_extend(&poisson_extend(&w, a).expect("y"), b).expect("y");
        let one = poisson_extend(&w, a + b).expect("y");
        semigroup = semigroup.max(two.samples().iter().zip(one.samples()).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())));
    }
    // five modes, fourth-order central differences with step y/100
    let modes = [(1.0, 0.7, 0.1), (2.0, -0.4, 1.3), (3.0, 0.25, -0.6), (4.0, 0.3, 2.0), (5.0, -0.2, 0.4)];
    let t = GridFunction::from_fn(1, 9, "five", |x| modes.iter().map(|(k, a, p)| a * (tau * k * x[0] + p).cos()).sum())
        .expect("grid");
    let y = 0.1;
    let h = y / 100.0;
    let at = |v: f64| poisson_extend(&t, v).expect("y");
    let (m2, m1, c0, p1, p2) = (at(y - 2.0 * h), at(y - h), at(y), at(y + h), at(y + 2.0 * h));
    let exact = d2y_extension(&t, y).expect("y");
    let scale = sup_norm(&exact);
    let mut fd = 0.0f64;
    for i in 0..t.samples().len() {
        let v = (-m2.samples()[i] + 16.0 * m1.samples()[i] - 30.0 * c0.samples()[i] + 16.0 * p1.samples()[i]
            - p2.samples()[i])
            / (12.0 * h * h);
        fd = fd.max((v - exact.samples()[i]).abs() / scale);
    }
    result(
        3,
        "Poisson correctness",
        start,
        closed <= 1e-10 && semigroup <= 1e-10 && fd <= 1e-6,
        format!("closed forms {closed:.1e}, semigroup {semigroup:.1e}, finite difference {fd:.1e}"),
        "1e-10, 1e-10, 1e-6",
        Vec::new(),
    )
}

const CORPUS_GRID: u32 = 14;

fn corpus_functions(s: &Settings, depth: u32) -> Vec<(Entry, GridFunction)> {
    corpus(1, depth)
        .into_iter()
        .map(|e| {
            let f = s.synth(&e.spec, 1, depth);
            (e, f)
        })
        .collect()
}

pub fn seminorm_comparability(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let bank = filter_bank(s.wavelet_p).expect("bank");
    let rows: Vec<(String, [f64; 3])> = corpus_functions(s, CORPUS_GRID)
        .par_iter()
        .flat_map_iter(|(e, f)| {
            let c = analyze(f, &bank).expect("analysis");
            [0.5, 1.0].into_iter().map(move |exp| {
                let direct = holder_seminorm_with(f, exp, s.directions).expect("s valid") + sup_norm(f);
                let wave = lip_wavelet_norm(&c, exp);
                let pois = holder_poisson_norm(f, exp).expect("s valid");
                (format!("{} s={exp}", e.name), [direct, wave, pois])
            })
        })
        .collect();
    let mut band = 1.0f64;
    let mut details = Vec::new();
    for (name, [d, w, p]) in rows.iter().map(|(n, v)| (n, *v)) {
        let b = spread(d, w).max(spread(d, p)).max(spread(w, p));
        band = band.max(b);
        details.push(format!("{name}: direct {d:.4} wavelet {w:.4} poisson {p:.4} spread {b:.2}"));
    }
    let secs = start.elapsed().as_secs_f64();
    result(
        4,
        "seminorm comparability",
        start,
        band <= 50.0 && secs < 120.0,
        format!("recorded band C = {band:.2}"),
        "C ≤ 50, < 120 s",
        details,
    )
}

pub fn jbmo_crosscheck(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let bank = filter_bank(s.wavelet_p).expect("bank");
    let rows: Vec<(String, f64, f64)> = corpus_functions(s, CORPUS_GRID)
        .par_iter()
        .flat_map_iter(|(e, f)| {
            let c = analyze(f, &bank).expect("analysis");
            [0.5, 1.0].into_iter().map(move |exp| {
                let w = jbmo_wavelet_norm(&c, exp);
                let d = jbmo_direct_norm(f, exp, CORPUS_GRID).expect("valid");
                (format!("{} s={exp}", e.name), w, d)
            })
        })
        .collect();
    let mut band = 1.0f64;
    let mut details = Vec::new();
    for (name, w, d) in &rows {
        band = band.max(spread(*w, *d));
        details.push(format!("{name}: wavelet {w:.4} direct {d:.4}"));
    }
    result(
        5,
        "Jbmo wavelet vs direct",
        start,
        band <= 50.0,
        format!("recorded band C = {band:.2}"),
        "C ≤ 50",
        details,
    )
}

pub fn projection_mechanics(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let bank = filter_bank(s.wavelet_p).expect("bank");
    let mut fs = corpus_functions(s, CORPUS_GRID);
    fs.extend(corpus(2, 7).into_iter().map(|e| {
        let f = s.synth(&e.spec, 2, 7);
        (e, f)
    }));
    let failures: Vec<String> = fs
        .par_iter()
        .flat_map_iter(|(e, f)| {
            let c = analyze(f, &bank).expect("analysis");
            let mut out = Vec::new();
            for exp in [0.5, 1.0] {
                let hi = lip_wavelet_seminorm(&c, exp);
                for frac in [0.25, 0.5, 0.75] {
                    let w = projection_distance_witness(&c, exp, frac * hi).expect("valid");
                    if !(w.residual_ok && w.box_ok) {
                        out.push(format!(
                            "{} n={} s={exp} ε={frac}·ε_hi: residual {:.3e} box ratio {:.3}",
                            e.name,
                            f.n(),
                            w.residual,
                            w.worst_ratio
                        ));
                    }
                }
            }
            out
        })
        .collect();
    let checks = fs.len() * 6;
    result(
        6,
        "projection mechanics",
        start,
        failures.is_empty(),
        format!("{} of {checks} (f, s, ε) cases fail", failures.len()),
        "all cases exact",
        failures,
    )
}

/// Corpus at the distance grid with the exponents each entry is tested at.
fn distance_cases(s: &Settings) -> Vec<(Entry, GridFunction, f64)> {
    corpus(1, DISTANCE_GRID)
        .into_iter()
        .flat_map(|e| {
            let f = s.synth(&e.spec, 1, DISTANCE_GRID);
            let exps = match e.lacunary_s() {
                Some(x) => vec![x],
                None => vec![0.5, 1.0],
            };
            exps.into_iter().map(move |x| (e.clone(), f.clone(), x))
        })
        .collect()
}

fn fields(f: &GridFunction, exp: f64, cfg: &EstimateConfig) -> Vec<MethodField> {
    Method::ALL
        .par_iter()
        .map(|&m| method_field(f, exp, m, cfg).expect("field"))
        .collect()
}

pub fn distance_separation(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let cfg = s.estimate(DISTANCE_RANGE.0..=DISTANCE_RANGE.1);
    let cases: Vec<_> = distance_cases(s)
        .into_iter()
        .filter(|(e, ..)| matches!(e.class, Class::Smooth | Class::Atom | Class::Lacunary { .. }))
        .collect();
    let rows: Vec<(String, Class, Vec<DistanceEstimate>, Vec<f64>)> = cases
        .par_iter()
        .map(|(e, f, exp)| {
            let fl = fields(f, *exp, &cfg);
            let est: Vec<DistanceEstimate> = fl.iter().map(|x| epsilon_star_for(x, &cfg).expect("estimate")).collect();
            let hi = fl.iter().map(|x| x.eps_hi).collect();
            (format!("{} s={exp}", e.name), e.class, est, hi)
        })
        .collect();
    let mut details = Vec::new();
    let mut fails = 0;
    let mut worst_sep = f64::INFINITY;
    for (name, class, est, hi) in rows {
        let cmp = compare_estimates(est, s.band);
        let mut line = format!("{name}:");
        let mut ok = cmp.within_band();
        for (e, h) in cmp.estimates.iter().zip(&hi) {
            let rel = if *h > 0.0 { e.eps_star / h } else { 0.0 };
            line += &format!(" {}={:.3e} ({:.3}·ε_hi)", e.method, e.eps_star, rel);
            match class {
                Class::Lacunary { .. } => {
                    worst_sep = worst_sep.min(rel);
                    ok &= rel > 0.05;
                }
                _ => ok &= e.is_zero(),
            }
            if !e.monotone() {
                line += " [non-monotone scan]";
            }
        }
        if !ok {
            fails += 1;
            line += "  FAIL";
        }
        details.push(line);
    }
    let secs = start.elapsed().as_secs_f64();
    result(
        7,
        "distance separation",
        start,
        fails == 0 && secs < 600.0,
        format!("{fails} failing functions; smallest lacunary ε₀/ε_hi = {worst_sep:.3}"),
        "lacunary ε₀ > 0.05·ε_hi, smooth/atoms 0, ratios in [1/32, 32], < 600 s",
        details,
    )
}

pub fn dilation_stability(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let cfg = s.estimate(DISTANCE_RANGE.0..=DISTANCE_RANGE.1);
    let range = DISTANCE_RANGE.0..=DISTANCE_RANGE.1;
    let cases = distance_cases(s);
    let rows: Vec<(usize, Vec<String>)> = cases
        .par_iter()
        .map(|(e, f, exp)| {
            let mut bad = Vec::new();
            let mut count = 0;
            for fl in fields(f, *exp, &cfg) {
                let set = fl.set(0.5 * fl.eps_hi);
                let base = carleson_sup(&set, range.clone(), s.theta).expect("range").diverging;
                let prox = ProximityField::for_radius(&set, 2.0);
                for r in [0.5, 1.0, 2.0] {
                    count += 1;
                    let grown = carleson_sup(&prox.enlarged(r), range.clone(), s.theta).expect("range").diverging;
                    if grown != base {
                        let deepest = (0..=set.j_max()).rev().find(|&j| set.level_count(j) > 0);
                        bad.push(format!(
                            "{} s={exp} {} R={r}: {} → {} (deepest cell level {:?})",
                            e.name, fl.method, base, grown, deepest
                        ));
                    }
                }
            }
            (count, bad)
        })
        .collect();
    let total: usize = rows.iter().map(|r| r.0).sum();
    let failures: Vec<String> = rows.into_iter().flat_map(|r| r.1).collect();
    result(
        8,
        "dilation stability",
        start,
        failures.is_empty(),
        format!("{} of {total} (set, R) flags change", failures.len()),
        "no flag changes",
        failures,
    )
}

pub fn inclusion_probes(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let cfg = s.estimate(DISTANCE_RANGE.0..=DISTANCE_RANGE.1);
    let f = s.synth(&format!("weierstrass s=1 levels={}", DISTANCE_GRID - 2), 1, DISTANCE_GRID);
    let fl = fields(&f, 1.0, &cfg);
    let mid: Vec<f64> = fl
        .iter()
        .map(|x| {
            let e = epsilon_star_for(x, &cfg).expect("estimate");
            0.5 * (e.bracket.0 + e.bracket.1)
        })
        .collect();
    let idx = |m: Method| Method::ALL.iter().position(|&x| x == m).expect("method");
    let pairs = [
        (Method::Wavelet, Method::SecDiff),
        (Method::SecDiff, Method::Poisson),
        (Method::Poisson, Method::Wavelet),
    ];
    let c_grid = [1.0, 0.5, 0.25, 0.125];
    let r_grid = [0.5, 1.0, 2.0, 4.0];
    let reports: Vec<_> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (i, j) = (idx(a), idx(b));
            inclusion_probe(&fl[i], 0.5 * mid[i], &fl[j], 0.5 * mid[j], &c_grid, &r_grid, 0.99).expect("probe")
        })
        .collect();
    let mut details = Vec::new();
    let mut ok = true;
    let mut observed = Vec::new();
    for r in &reports {
        let tag = format!("{}⊆{}", r.source, r.target);
        match r.achieved {
            Some((c, rad)) => observed.push(format!("{tag} at (c={c}, R={rad})")),
            None => {
                ok = false;
                observed.push(format!("{tag} not achieved"));
            }
        }
        let best = r.grid.iter().fold(0.0f64, |m, g| m.max(g.fraction));
        details.push(format!("{tag}: {} source cells, best fraction {best:.4}", r.source_cells));
    }
    result(
        9,
        "inclusion probes",
        start,
        ok,
        observed.join("; "),
        "each inclusion ≥ 0.99 for some (c, R) in the grids",
        details,
    )
}

pub fn continuity(s: &Settings) -> CriterionResult {
    let start = Instant::now();
    let depth = 12;
    let cases: Vec<(Entry, GridFunction, f64)> = corpus(1, depth)
        .into_iter()
        .flat_map(|e| {
            let f = s.synth(&e.spec, 1, depth);
            [0.5, 1.0].into_iter().map(move |x| (e.clone(), f.clone(), x))
        })
        .collect();
    let rows: Vec<(String, [f64; 4])> = cases
        .par_iter()
        .map(|(e, f, exp)| {
            let a = continuity_check(f, *exp, s.pairs, s.seed, s.directions).expect("nondegenerate").max_ratio;
            let b = continuity_check(f, *exp, 2 * s.pairs, s.seed, s.directions).expect("nondegenerate").max_ratio;
            let c = lipschitz_check(f, *exp, s.pairs, s.seed).expect("nondegenerate").max_ratio;
            let d = lipschitz_check(f, *exp, 2 * s.pairs, s.seed).expect("nondegenerate").max_ratio;
            (format!("{} s={exp}", e.name), [a, b, c, d])
        })
        .collect();
    let stable = |x: f64, y: f64| x.is_finite() && y.is_finite() && (y - x).abs() <= 0.2 * x.max(y);
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for (name, [a, b, c, d]) in &rows {
        for (x, y) in [(a, b), (c, d)] {
            largest = largest.max(*y);
            if x.max(*y) > 0.0 {
                worst = worst.max((y - x).abs() / x.max(*y));
            }
        }
        if !stable(*a, *b) || !stable(*c, *d) {
            fails.push(format!("{name}: second differences {a:.3} → {b:.3}, Poisson {c:.3} → {d:.3}"));
        }
    }
    let mut details = fails.clone();
    details.push(format!("largest ratio {largest:.3} over {} cases", rows.len()));
    result(
        10,
        "continuity checks",
        start,
        fails.is_empty(),
        format!("worst change under doubling {:.1}%, {} unstable", 100.0 * worst, fails.len()),
        "finite, change ≤ 20%",
        details,
    )
}

pub type Criterion = fn(&Settings) -> CriterionResult;

pub const CRITERIA: [Criterion; 10] = [
    carleson_exactness,
    wavelet_correctness,
    poisson_correctness,
    seminorm_comparability,
    jbmo_crosscheck,
    projection_mechanics,
    distance_separation,
    dilation_stability,
    inclusion_probes,
    continuity,
];

pub fn run_all(s: &Settings) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| c(s)).collect()
}
