//! Harmonic (Poisson) extension `u(x,y) = (P_y ∗ f)(x)` on the torus, the
//! hyperbolic second derivative `y^{2−s} ∂²u/∂y²`, the set `D(s,f,ε)` and the
//! bmo / bmo-Sobolev norms.
//!
//! Every extension is a Fourier multiplier: `e^{−2π|k|y}` for `u` and
//! `(2π|k|)² e^{−2π|k|y}` for `∂²u/∂y²`.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{hyperbolic_distance, CellField, DyadicCube, HalfSpacePoint, HalfSpaceSet};
use crate::gridfn::{bessel_lift, from_spectral, sup_norm, to_spectral, GridFunction, SpectralFunction};
use crate::math::{cos, exp, exp2i, ln, powf, sin, sqrt, PI, TAU};
use crate::secdiff::check_exponent;
use crate::{Error, Result};

/// Per-cell probe maximum of `y^{2−s}|∂²u/∂y²|`.
pub type DerivativeField = CellField;

fn check_height(y: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::range("height", alloc::format!("y = {y}; need y > 0")));
    }
    Ok(())
}

/// `u(·, y)`.
pub fn poisson_extend(f: &GridFunction, y: f64) -> Result<GridFunction> {
    check_height(y)?;
    let label = alloc::format!("P_{y}[{}]", f.label());
    Ok(crate::gridfn::radial_multiplier(f, label, |k| exp(-TAU * k * y)))
}

/// `∂²u/∂y²(·, y)`.
pub fn d2y_extension(f: &GridFunction, y: f64) -> Result<GridFunction> {
    check_height(y)?;
    let label = alloc::format!("d2y P_{y}[{}]", f.label());
    Ok(crate::gridfn::radial_multiplier(f, label, |k| {
        let xi = TAU * k;
        xi * xi * exp(-xi * y)
    }))
}

/// Nonzero Fourier modes of `f`, for evaluating the extension off the grid.
#[derive(Debug, Clone)]
pub struct ModeList {
    n: usize,
    modes: Vec<([f64; 2], f64, Complex64)>,
}

impl ModeList {
    pub fn new(spec: &SpectralFunction) -> Self {
        let side = spec.side();
        let largest = spec.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let cutoff = 1e-15 * largest;
        let mut modes = Vec::new();
        for (pos, c) in spec.coeffs().iter().enumerate() {
            if c.norm() <= cutoff {
                continue;
            }
            let k = if spec.n() == 1 {
                [spec.frequency(pos) as f64, 0.0]
            } else {
                [spec.frequency(pos % side) as f64, spec.frequency(pos / side) as f64]
            };
            modes.push((k, sqrt(k[0] * k[0] + k[1] * k[1]), *c));
        }
        ModeList { n: spec.n(), modes }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `∂²u/∂y²(x, y)` from the Fourier series.
    pub fn d2y_at(&self, x: [f64; 2], y: f64) -> f64 {
        let x1 = if self.n == 2 { x[1] } else { 0.0 };
        self.modes
            .iter()
            .map(|(k, norm, c)| {
                let xi = TAU * norm;
                let t = TAU * (k[0] * x[0] + k[1] * x1);
                xi * xi * exp(-xi * y) * (c.re * cos(t) - c.im * sin(t))
            })
            .sum()
    }
}

fn probe_heights(j: u32) -> [f64; 4] {
    let l = exp2i(-(j as i32));
    [0.625 * l, 0.75 * l, 0.875 * l, l]
}

/// `max y^{2−s}|∂²u/∂y²(x,y)|` over every grid `x` in the cell and the heights
/// `{5/8, 3/4, 7/8, 1}·l(Q)`, levels `0..=j_max`.
pub fn derivative_field(f: &GridFunction, s: f64, j_max: u32) -> Result<DerivativeField> {
    check_exponent(s)?;
    crate::secdiff::check_depth(f, j_max)?;
    let spec = to_spectral(f);
    let n = f.n();
    let depth = f.depth();
    let side = f.side();
    let mut values = Vec::with_capacity(j_max as usize + 1);
    for j in 0..=j_max {
        let cells = 1usize << (n as u32 * j);
        let mut level = alloc::vec![0.0f64; cells];
        let shift = depth - j;
        for y in probe_heights(j) {
            let weight = powf(y, 2.0 - s);
            let u = from_spectral(
                &spec.apply_radial(|k| {
                    let xi = TAU * k;
                    xi * xi * exp(-xi * y)
                }),
                "",
            );
            for (flat, v) in u.samples().iter().enumerate() {
                let cell = if n == 1 {
                    flat >> shift
                } else {
                    let (i0, i1) = (flat % side, flat / side);
                    (i1 >> shift) * (1 << j) + (i0 >> shift)
                };
                let w = weight * v.abs();
                if w > level[cell] {
                    level[cell] = w;
                }
            }
        }
        values.push(level);
    }
    CellField::from_levels(n, values)
}

/// `‖f‖_∞ + sup y^{2−s}|∂²u/∂y²|` over the Whitney probes of levels `0..=J_grid−2`.
pub fn holder_poisson_norm(f: &GridFunction, s: f64) -> Result<f64> {
    let field = derivative_field(f, s, f.depth() - 2)?;
    Ok(sup_norm(f) + field.max())
}

/// `D(s,f,ε)`: cells whose probe maximum of `y^{2−s}|∂²u/∂y²|` exceeds `ε`.
pub fn build_d(f: &GridFunction, s: f64, eps: f64, j_max: u32) -> Result<HalfSpaceSet> {
    Ok(derivative_field(f, s, j_max)?.threshold(eps))
}

/// Largest observed `|g(p) − g(q)| / (norm·ρ(p,q))` for `g = y^{2−s}∂²u/∂y²`
/// over random pairs with `ρ ≤ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport {
    pub s: f64,
    pub pairs: usize,
    /// [`holder_poisson_norm`] of `f`.
    pub norm: f64,
    pub max_ratio: f64,
}

pub fn lipschitz_check(f: &GridFunction, s: f64, sample_count: usize, seed: u64) -> Result<LipschitzReport> {
    check_exponent(s)?;
    let norm = holder_poisson_norm(f, s)?;
    if norm == 0.0 {
        return Err(Error::Degenerate("Lipschitz check of the zero function"));
    }
    let modes = ModeList::new(&to_spectral(f));
    let n = f.n();
    let g = |p: &HalfSpacePoint| powf(p.y(), 2.0 - s) * modes.d2y_at(p.x(), p.y());
    let y_min = exp2i(-(f.depth() as i32 - 2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut pairs = 0;
    while pairs < sample_count {
        let y = exp(rng.gen_range(ln(y_min)..=0.0));
        let x = [rng.gen::<f64>(), rng.gen::<f64>()];
        let p = HalfSpacePoint::new(n, x, y);
        let r = exp(rng.gen_range(ln(1e-3)..=ln(2.0)));
        let phi: f64 = rng.gen_range(0.0..TAU);
        let y2 = y * exp(r * sin(phi));
        if !(y_min..=1.0).contains(&y2) {
            continue;
        }
        let step = y * r * cos(phi);
        let dir: f64 = rng.gen_range(0.0..PI);
        let q = HalfSpacePoint::new(n, [x[0] + step * cos(dir), x[1] + step * sin(dir)], y2);
        let rho = hyperbolic_distance(&p, &q);
        if rho == 0.0 || rho > 2.0 {
            continue;
        }
        max_ratio = max_ratio.max((g(&p) - g(&q)).abs() / (norm * rho));
        pairs += 1;
    }
    Ok(LipschitzReport {
        s,
        pairs,
        norm,
        max_ratio,
    })
}

/// Count, mean and sum of squared deviations of a block of samples.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn merge(parts: &[Moments]) -> Moments {
        let count: f64 = parts.iter().map(|p| p.count).sum();
        let mean = parts.iter().map(|p| p.count * p.mean).sum::<f64>() / count;
        let m2 = parts
            .iter()
            .map(|p| {
                let d = p.mean - mean;
                p.m2 + p.count * d * d
            })
            .sum();
        Moments { count, mean, m2 }
    }
}

/// Dyadic `bmo` norm: `sup_Q ((1/|Q|)∫_Q |f − f_Q|²)^{1/2}` over cubes of levels
/// `0..=j_max`, plus `(∫_{[0,1)^n} |f|²)^{1/2}` for the single unit cube.
pub fn bmo_norm(f: &GridFunction, j_max: u32) -> Result<f64> {
    let depth = f.depth();
    if j_max > depth {
        return Err(Error::range(
            "J_max",
            alloc::format!("J_max = {j_max} exceeds the grid depth {depth}"),
        ));
    }
    let n = f.n();
    let mut level: Vec<Moments> = f
        .samples()
        .iter()
        .map(|&v| Moments {
            count: 1.0,
            mean: v,
            m2: 0.0,
        })
        .collect();
    let mut sup = 0.0f64;
    for j in (0..=depth).rev() {
        if j < depth {
            let side = 1usize << j;
            let fine = 2 * side;
            level = (0..1usize << (n as u32 * j))
                .map(|flat| {
                    if n == 1 {
                        Moments::merge(&[level[2 * flat], level[2 * flat + 1]])
                    } else {
                        let (i0, i1) = (flat % side, flat / side);
                        let b = 2 * i1 * fine + 2 * i0;
                        Moments::merge(&[level[b], level[b + 1], level[b + fine], level[b + fine + 1]])
                    }
                })
                .collect();
        }
        if j <= j_max {
            for m in &level {
                sup = sup.max(m.m2 / m.count);
            }
        }
    }
    Ok(sqrt(sup) + sqrt(f.l2_norm_sq()))
}

/// `‖J^{−s} f‖_bmo`.
pub fn jbmo_direct_norm(f: &GridFunction, s: f64, j_max: u32) -> Result<f64> {
    check_exponent(s)?;
    bmo_norm(&bessel_lift(f, -s), j_max)
}

/// The cube that `x` (lattice coordinates) falls into at level `j`.
pub fn cube_of(f: &GridFunction, flat: usize, j: u32) -> DyadicCube {
    let [i0, i1] = f.coords(flat);
    let shift = f.depth() - j;
    DyadicCube::raw(f.n(), j, [(i0 >> shift) as u32, (i1 >> shift) as u32])
}
