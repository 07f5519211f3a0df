//! Sampled periodic functions on the dyadic grid of `[0,1)^n` and their
//! Fourier series.
//!
//! Frequencies are integers `k` with `ξ = 2πk`; a two-dimensional grid is
//! stored row-major with the second coordinate as the row, i.e. sample
//! `(i0, i1)` lives at `i1 * side + i0`.

mod dsl;
pub(crate) mod fft;
mod synth;

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::{exp2i, sqrt, PI};
use crate::{Error, Result};

pub use dsl::{parse_function_spec, FunctionSpec, Signs};
pub use synth::{synthesize, synthesize_with, SampleLoader, SynthOptions};

/// Samples of a real periodic function at `k·2^{-depth}`, `k ∈ [0, 2^depth)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    n: usize,
    depth: u32,
    samples: Vec<f64>,
    label: String,
}

/// Depth limits per dimension.
pub fn depth_range(n: usize) -> core::ops::RangeInclusive<u32> {
    match n {
        2 => 4..=11,
        _ => 4..=20,
    }
}

impl GridFunction {
    pub fn new(n: usize, depth: u32, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if n != 1 && n != 2 {
            return Err(Error::range("dimension", alloc::format!("n = {n}, expected 1 or 2")));
        }
        if !depth_range(n).contains(&depth) {
            return Err(Error::range(
                "grid depth",
                alloc::format!("depth {depth} not in {:?} for n = {n}", depth_range(n)),
            ));
        }
        let expected = 1usize << (n as u32 * depth);
        if samples.len() != expected {
            return Err(Error::Shape(alloc::format!(
                "{} samples, expected 2^(n·depth) = {expected}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::range("sample", alloc::format!("sample {i} is not finite")));
        }
        Ok(GridFunction {
            n,
            depth,
            samples,
            label: label.into(),
        })
    }

    /// Builds a grid function by evaluating `f` at every lattice point.
    pub fn from_fn(
        n: usize,
        depth: u32,
        label: impl Into<String>,
        mut f: impl FnMut(&[f64]) -> f64,
    ) -> Result<Self> {
        let side = 1usize << depth;
        let h = 1.0 / side as f64;
        let samples = match n {
            1 => (0..side).map(|i| f(&[i as f64 * h])).collect(),
            _ => {
                let mut out = Vec::with_capacity(side * side);
                for i1 in 0..side {
                    for i0 in 0..side {
                        out.push(f(&[i0 as f64 * h, i1 as f64 * h]));
                    }
                }
                out
            }
        };
        GridFunction::new(n, depth, samples, label)
    }

    pub fn constant(n: usize, depth: u32, value: f64) -> Result<Self> {
        GridFunction::new(n, depth, alloc::vec![value; 1 << (n as u32 * depth)], "constant")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `J_grid`: samples per axis are `2^depth`.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn side(&self) -> usize {
        1 << self.depth
    }

    pub fn spacing(&self) -> f64 {
        exp2i(-(self.depth as i32))
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Sample at integer lattice coordinates, wrapped periodically.
    #[inline]
    pub fn at(&self, idx: [i64; 2]) -> f64 {
        let side = self.side() as i64;
        let i0 = idx[0].rem_euclid(side) as usize;
        if self.n == 1 {
            self.samples[i0]
        } else {
            let i1 = idx[1].rem_euclid(side) as usize;
            self.samples[i1 * self.side() + i0]
        }
    }

    /// Lattice coordinates of the flat sample index.
    #[inline]
    pub fn coords(&self, flat: usize) -> [i64; 2] {
        if self.n == 1 {
            [flat as i64, 0]
        } else {
            [(flat % self.side()) as i64, (flat / self.side()) as i64]
        }
    }

    pub(crate) fn same_shape(&self, other: &GridFunction) -> Result<()> {
        if self.n != other.n || self.depth != other.depth {
            return Err(Error::Shape(alloc::format!(
                "grid (n={}, depth={}) vs (n={}, depth={})",
                self.n,
                self.depth,
                other.n,
                other.depth
            )));
        }
        Ok(())
    }

    /// Pointwise sum; the label records both operands.
    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.same_shape(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        GridFunction::new(
            self.n,
            self.depth,
            samples,
            alloc::format!("{} + {}", self.label, other.label),
        )
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.same_shape(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        GridFunction::new(
            self.n,
            self.depth,
            samples,
            alloc::format!("{} - {}", self.label, other.label),
        )
    }

    pub fn scale(&self, lambda: f64) -> GridFunction {
        GridFunction {
            n: self.n,
            depth: self.depth,
            samples: self.samples.iter().map(|v| v * lambda).collect(),
            label: alloc::format!("{}·({})", lambda, self.label),
        }
    }

    /// `Σ samples² · 2^{-n·depth}`, the squared `L²` norm of the sampled function.
    pub fn l2_norm_sq(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum::<f64>() / self.samples.len() as f64
    }
}

/// `‖f‖_∞` over the grid.
pub fn sup_norm(f: &GridFunction) -> f64 {
    f.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Fourier coefficients `f̂(k) = 2^{-n·depth} Σ f(x) e^{-2πik·x}`, stored in FFT
/// order: array position `m` holds frequency `m` for `m ≤ side/2`, else `m − side`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    n: usize,
    depth: u32,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn side(&self) -> usize {
        1 << self.depth
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Integer frequency of FFT array position `m` along one axis.
    #[inline]
    pub fn frequency(&self, m: usize) -> i64 {
        let side = self.side();
        if m <= side / 2 {
            m as i64
        } else {
            m as i64 - side as i64
        }
    }

    fn position(&self, k: i64) -> usize {
        k.rem_euclid(self.side() as i64) as usize
    }

    /// Coefficient at integer frequency `k` (second entry ignored for n = 1).
    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        let p0 = self.position(k[0]);
        if self.n == 1 {
            self.coeffs[p0]
        } else {
            self.coeffs[self.position(k[1]) * self.side() + p0]
        }
    }

    /// `|k|²` for every array position, in array order.
    pub fn frequency_norms_sq(&self) -> Vec<f64> {
        let side = self.side();
        match self.n {
            1 => (0..side)
                .map(|m| {
                    let k = self.frequency(m) as f64;
                    k * k
                })
                .collect(),
            _ => {
                let mut out = Vec::with_capacity(side * side);
                for m1 in 0..side {
                    let k1 = self.frequency(m1) as f64;
                    for m0 in 0..side {
                        let k0 = self.frequency(m0) as f64;
                        out.push(k0 * k0 + k1 * k1);
                    }
                }
                out
            }
        }
    }

    /// Multiplies every coefficient by `m(|k|)`.
    pub fn apply_radial(&self, mut multiplier: impl FnMut(f64) -> f64) -> SpectralFunction {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.frequency_norms_sq())
            .map(|(c, k2)| c * multiplier(sqrt(k2)))
            .collect();
        SpectralFunction {
            n: self.n,
            depth: self.depth,
            coeffs,
        }
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn to_spectral(f: &GridFunction) -> SpectralFunction {
    let mut data: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::transform(&mut data, f.n, f.side(), false);
    let norm = 1.0 / data.len() as f64;
    for c in &mut data {
        *c *= norm;
    }
    SpectralFunction {
        n: f.n,
        depth: f.depth,
        coeffs: data,
    }
}

/// Inverse of [`to_spectral`]; imaginary residue from rounding is dropped.
pub fn from_spectral(spec: &SpectralFunction, label: impl Into<String>) -> GridFunction {
    let mut data = spec.coeffs.clone();
    fft::transform(&mut data, spec.n, spec.side(), true);
    GridFunction {
        n: spec.n,
        depth: spec.depth,
        samples: data.into_iter().map(|c| c.re).collect(),
        label: label.into(),
    }
}

/// Real spectral multiplier `m(|k|)` applied to a grid function.
pub fn radial_multiplier(
    f: &GridFunction,
    label: impl Into<String>,
    multiplier: impl FnMut(f64) -> f64,
) -> GridFunction {
    from_spectral(&to_spectral(f).apply_radial(multiplier), label)
}

/// Bessel potential of order `r`: multiplier `(1 + |2πk|²)^{-r/2}`.
///
/// Negative orders raise smoothness demands; `bessel_lift(f, -s)` is the map
/// whose `bmo` norm defines the bmo-Sobolev norm of order `s`.
pub fn bessel_lift(f: &GridFunction, r: f64) -> GridFunction {
    let label = alloc::format!("J^{r}({})", f.label);
    radial_multiplier(f, label, |k| {
        let xi = 2.0 * PI * k;
        crate::math::powf(1.0 + xi * xi, -r / 2.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, TAU};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, depth: u32, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = 1 << (n as u32 * depth);
        GridFunction::new(n, depth, (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect(), "rand")
            .unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(GridFunction::new(1, 3, alloc::vec![0.0; 8], "x").is_err());
        assert!(GridFunction::new(1, 4, alloc::vec![0.0; 15], "x").is_err());
        assert!(GridFunction::new(3, 4, alloc::vec![0.0; 16], "x").is_err());
        assert!(GridFunction::new(2, 12, alloc::vec![], "x").is_err());
        let mut v = alloc::vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(GridFunction::new(1, 4, v, "x").is_err());
    }

    #[test]
    fn constant_has_only_dc() {
        let f = GridFunction::constant(1, 6, 1.0).unwrap();
        let s = to_spectral(&f);
        assert!((s.coeff([0, 0]).re - 1.0).abs() < 1e-15);
        for k in 1..32 {
            assert!(s.coeff([k, 0]).norm() < 1e-15);
        }
    }

    #[test]
    fn single_mode_has_half_amplitude() {
        let f = GridFunction::from_fn(1, 8, "cos", |x| cos(TAU * x[0])).unwrap();
        let s = to_spectral(&f);
        assert!((s.coeff([1, 0]).re - 0.5).abs() < 1e-14);
        assert!((s.coeff([-1, 0]).re - 0.5).abs() < 1e-14);
        assert!(s.coeff([2, 0]).norm() < 1e-14);

        let g = GridFunction::from_fn(2, 5, "cos2", |x| cos(TAU * (x[0] + 2.0 * x[1]))).unwrap();
        let s = to_spectral(&g);
        assert!((s.coeff([1, 2]).re - 0.5).abs() < 1e-14);
        assert!((s.coeff([-1, -2]).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn round_trip_and_parseval() {
        for (n, depth) in [(1, 10), (2, 6)] {
            let f = random(n, depth, 7);
            let s = to_spectral(&f);
            let back = from_spectral(&s, "back");
            let err = f
                .samples()
                .iter()
                .zip(back.samples())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(err < 1e-12 * sup_norm(&f));
            let rel = (f.l2_norm_sq() - s.energy()).abs() / f.l2_norm_sq();
            assert!(rel < 1e-10);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let f = random(2, 5, 3);
        let s = to_spectral(&f);
        for k0 in -15..=15 {
            for k1 in -15..=15 {
                let a = s.coeff([k0, k1]);
                let b = s.coeff([-k0, -k1]).conj();
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn lift_constant_and_single_mode() {
        let c = GridFunction::constant(1, 6, 2.5).unwrap();
        for r in [-1.0, 0.5, 2.0] {
            let l = bessel_lift(&c, r);
            assert!(l.samples().iter().all(|v| (v - 2.5).abs() < 1e-13));
        }
        let f = GridFunction::from_fn(1, 8, "cos", |x| cos(TAU * x[0])).unwrap();
        let l = bessel_lift(&f, -1.0);
        let factor = sqrt(1.0 + 4.0 * PI * PI);
        for (i, v) in l.samples().iter().enumerate() {
            let expect = factor * cos(TAU * i as f64 / 256.0);
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_inverse_pair() {
        let f = random(1, 10, 11);
        let g = bessel_lift(&bessel_lift(&f, 2.0), -2.0);
        let err = f
            .samples()
            .iter()
            .zip(g.samples())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn sup_norm_cases() {
        assert_eq!(sup_norm(&GridFunction::constant(1, 4, -3.0).unwrap()), 3.0);
        let f = GridFunction::from_fn(1, 4, "cos", |x| cos(TAU * x[0])).unwrap();
        assert_eq!(sup_norm(&f), 1.0);
        let g = random(1, 6, 1);
        let h = random(1, 6, 2);
        assert!(sup_norm(&g.add(&h).unwrap()) <= sup_norm(&g) + sup_norm(&h));
    }
}
