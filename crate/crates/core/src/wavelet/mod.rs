//! Periodized orthonormal Daubechies wavelets on the torus, the wavelet
//! characterizations of `lip_s` and `J^s bmo`, the bad sets `W`/`T` and the
//! truncation projection onto `J^s bmo`.
//!
//! Atoms are indexed as `ω = (l, j, k)` with orientation `l ∈ 1..=2^n−1`,
//! level `0 ≤ j < J_grid` and position `k ∈ [0, 2^j)^n`. The filter shift is
//! chosen so that the energy of `ψ_{(l,j,k)}` sits over the dyadic cube `(j,k)`.

mod taps;

use alloc::vec::Vec;

use crate::dyadic::{DyadicCube, HalfSpaceSet};
use crate::gridfn::GridFunction;
use crate::math::{exp2i, powf, sqrt};
use crate::{Error, Result};

/// Low-pass taps `h` of a Daubechies filter and the high-pass taps
/// `g[m] = (−1)^m h[L−1−m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    p: usize,
    low: Vec<f64>,
    high: Vec<f64>,
}

pub const DEFAULT_VANISHING_MOMENTS: usize = 8;

pub fn filter_bank(p: usize) -> Result<FilterBank> {
    if !(2..=10).contains(&p) {
        return Err(Error::range(
            "vanishing moments",
            alloc::format!("p = {p}; supported banks have 2 ≤ p ≤ 10"),
        ));
    }
    let low: Vec<f64> = taps::DAUBECHIES[p - 2].to_vec();
    let len = low.len();
    let high = (0..len)
        .map(|m| if m % 2 == 0 { low[len - 1 - m] } else { -low[len - 1 - m] })
        .collect();
    Ok(FilterBank { p, low, high })
}

impl FilterBank {
    pub fn vanishing_moments(&self) -> usize {
        self.p
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }

    /// Position shift applied at every level, in samples of the finer level.
    fn shift(&self) -> usize {
        self.p - 1
    }

    /// Smallest grid depth whose side holds the whole filter.
    pub fn min_depth(&self) -> u32 {
        self.len().next_power_of_two().trailing_zeros()
    }

    pub fn name(&self) -> alloc::string::String {
        alloc::format!("db{}", self.p)
    }
}

/// `d` plus `c_{(l,j,k)}` for every level of a `J_grid` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    n: usize,
    depth: u32,
    d: f64,
    /// `bands[j]` holds orientation `l` at `(l−1)·2^{nj} + flat(k)`.
    bands: Vec<Vec<f64>>,
}

impl WaveletCoefficients {
    pub fn zeros(n: usize, depth: u32) -> Self {
        let orientations = (1usize << n) - 1;
        let bands = (0..depth).map(|j| alloc::vec![0.0; orientations << (n as u32 * j)]).collect();
        WaveletCoefficients {
            n,
            depth,
            d: 0.0,
            bands,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn orientations(&self) -> usize {
        (1 << self.n) - 1
    }

    /// Scaling coefficient of the single level-0 cube.
    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn set_d(&mut self, d: f64) {
        self.d = d;
    }

    /// All orientations at level `j`, orientation-major.
    pub fn band(&self, j: u32) -> &[f64] {
        &self.bands[j as usize]
    }

    pub fn band_mut(&mut self, j: u32) -> &mut [f64] {
        &mut self.bands[j as usize]
    }

    fn slot(&self, l: u32, j: u32, flat: usize) -> usize {
        ((l as usize - 1) << (self.n as u32 * j)) + flat
    }

    fn check(&self, l: u32, j: u32, k: [u32; 2]) -> Result<usize> {
        if l < 1 || l as usize > self.orientations() {
            return Err(Error::range("orientation", alloc::format!("l = {l} for n = {}", self.n)));
        }
        if j >= self.depth {
            return Err(Error::range(
                "wavelet level",
                alloc::format!("j = {j}, grid depth {}", self.depth),
            ));
        }
        let cube = DyadicCube::new(self.n, j, k)?;
        Ok(self.slot(l, j, cube.flat()))
    }

    pub fn get(&self, l: u32, j: u32, k: [u32; 2]) -> Result<f64> {
        let at = self.check(l, j, k)?;
        Ok(self.bands[j as usize][at])
    }

    pub fn set(&mut self, l: u32, j: u32, k: [u32; 2], value: f64) -> Result<()> {
        let at = self.check(l, j, k)?;
        self.bands[j as usize][at] = value;
        Ok(())
    }

    /// Every `(l, j, k, c)`, ordered by level, orientation, then position.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32, [u32; 2], f64)> + '_ {
        let n = self.n;
        self.bands.iter().enumerate().flat_map(move |(j, band)| {
            let per = 1usize << (n as u32 * j as u32);
            band.iter().enumerate().map(move |(i, &v)| {
                let cube = DyadicCube::from_flat(n, j as u32, i % per);
                ((i / per) as u32 + 1, j as u32, cube.index(), v)
            })
        })
    }

    /// `max_l |c_{(l,Q)}|` for every cube of level `j`, in flat order.
    pub fn level_max(&self, j: u32) -> Vec<f64> {
        let per = 1usize << (self.n as u32 * j);
        let band = &self.bands[j as usize];
        (0..per)
            .map(|flat| {
                (0..self.orientations()).fold(0.0f64, |m, l| m.max(band[l * per + flat].abs()))
            })
            .collect()
    }

    /// Total number of coefficients, `2^{n·J_grid}`.
    pub fn len(&self) -> usize {
        1 + self.bands.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn energy(&self) -> f64 {
        self.d * self.d + self.bands.iter().flatten().map(|c| c * c).sum::<f64>()
    }

    pub fn sub(&self, other: &WaveletCoefficients) -> Result<WaveletCoefficients> {
        if self.n != other.n || self.depth != other.depth {
            return Err(Error::Shape("coefficient tables of different shape".into()));
        }
        let bands = self
            .bands
            .iter()
            .zip(&other.bands)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(WaveletCoefficients {
            n: self.n,
            depth: self.depth,
            d: self.d - other.d,
            bands,
        })
    }

    pub fn scale(&self, lambda: f64) -> WaveletCoefficients {
        WaveletCoefficients {
            n: self.n,
            depth: self.depth,
            d: self.d * lambda,
            bands: self.bands.iter().map(|b| b.iter().map(|c| c * lambda).collect()).collect(),
        }
    }
}

#[inline]
fn wrap(i: isize, m: usize) -> usize {
    i.rem_euclid(m as isize) as usize
}

fn analysis_step(bank: &FilterBank, input: &[f64], lo: &mut [f64], hi: &mut [f64]) {
    let m = input.len();
    let shift = bank.shift() as isize;
    for k in 0..m / 2 {
        let base = 2 * k as isize - shift;
        let (mut a, mut d) = (0.0, 0.0);
        for (t, (h, g)) in bank.low.iter().zip(&bank.high).enumerate() {
            let v = input[wrap(base + t as isize, m)];
            a += h * v;
            d += g * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

fn synthesis_step(bank: &FilterBank, lo: &[f64], hi: &[f64], out: &mut [f64]) {
    let m = out.len();
    let shift = bank.shift() as isize;
    out.fill(0.0);
    for k in 0..m / 2 {
        let base = 2 * k as isize - shift;
        for (t, (h, g)) in bank.low.iter().zip(&bank.high).enumerate() {
            out[wrap(base + t as isize, m)] += h * lo[k] + g * hi[k];
        }
    }
}

/// One 2-D analysis level: `a` is `m × m`; returns `LL` and writes the three
/// detail quadrants into `band` (orientation-major, each `m/2 × m/2`).
fn analysis_step_2d(bank: &FilterBank, a: &[f64], m: usize, band: &mut [f64]) -> Vec<f64> {
    let half = m / 2;
    let mut lx = alloc::vec![0.0; m * half];
    let mut hx = alloc::vec![0.0; m * half];
    for (r, row) in a.chunks(m).enumerate() {
        let (lo, hi) = (&mut lx[r * half..(r + 1) * half], &mut hx[r * half..(r + 1) * half]);
        analysis_step(bank, row, lo, hi);
    }
    let per = half * half;
    let mut ll = alloc::vec![0.0; per];
    let mut column = alloc::vec![0.0; m];
    let mut lo = alloc::vec![0.0; half];
    let mut hi = alloc::vec![0.0; half];
    for c in 0..half {
        for r in 0..m {
            column[r] = lx[r * half + c];
        }
        analysis_step(bank, &column, &mut lo, &mut hi);
        for r in 0..half {
            ll[r * half + c] = lo[r];
            band[per + r * half + c] = hi[r];
        }
        for r in 0..m {
            column[r] = hx[r * half + c];
        }
        analysis_step(bank, &column, &mut lo, &mut hi);
        for r in 0..half {
            band[r * half + c] = lo[r];
            band[2 * per + r * half + c] = hi[r];
        }
    }
    ll
}

fn synthesis_step_2d(bank: &FilterBank, ll: &[f64], band: &[f64], m: usize) -> Vec<f64> {
    let half = m / 2;
    let per = half * half;
    let mut lx = alloc::vec![0.0; m * half];
    let mut hx = alloc::vec![0.0; m * half];
    let mut lo = alloc::vec![0.0; half];
    let mut hi = alloc::vec![0.0; half];
    let mut column = alloc::vec![0.0; m];
    for c in 0..half {
        for r in 0..half {
            lo[r] = ll[r * half + c];
            hi[r] = band[per + r * half + c];
        }
        synthesis_step(bank, &lo, &hi, &mut column);
        for r in 0..m {
            lx[r * half + c] = column[r];
        }
        for r in 0..half {
            lo[r] = band[r * half + c];
            hi[r] = band[2 * per + r * half + c];
        }
        synthesis_step(bank, &lo, &hi, &mut column);
        for r in 0..m {
            hx[r * half + c] = column[r];
        }
    }
    let mut out = alloc::vec![0.0; m * m];
    for (r, row) in out.chunks_mut(m).enumerate() {
        synthesis_step(bank, &lx[r * half..(r + 1) * half], &hx[r * half..(r + 1) * half], row);
    }
    out
}

fn check_depth(bank: &FilterBank, depth: u32) -> Result<()> {
    if depth < bank.min_depth() {
        return Err(Error::range(
            "grid depth",
            alloc::format!(
                "{} taps need at least 2^{} samples per axis, grid has 2^{depth}",
                bank.len(),
                bank.min_depth()
            ),
        ));
    }
    Ok(())
}

/// Full periodized decomposition down to the single level-0 scaling coefficient.
pub fn analyze(f: &GridFunction, bank: &FilterBank) -> Result<WaveletCoefficients> {
    check_depth(bank, f.depth())?;
    let (n, depth) = (f.n(), f.depth());
    let mut out = WaveletCoefficients::zeros(n, depth);
    let norm = sqrt(exp2i(-((n as u32 * depth) as i32)));
    let mut a: Vec<f64> = f.samples().iter().map(|v| v * norm).collect();
    for level in (1..=depth).rev() {
        let m = 1usize << level;
        let band = &mut out.bands[level as usize - 1];
        a = if n == 1 {
            let mut lo = alloc::vec![0.0; m / 2];
            analysis_step(bank, &a, &mut lo, band);
            lo
        } else {
            analysis_step_2d(bank, &a, m, band)
        };
    }
    out.d = a[0];
    Ok(out)
}

/// Inverse of [`analyze`].
pub fn reconstruct(coeffs: &WaveletCoefficients, bank: &FilterBank) -> Result<GridFunction> {
    check_depth(bank, coeffs.depth)?;
    let (n, depth) = (coeffs.n, coeffs.depth);
    let mut a = alloc::vec![coeffs.d];
    for level in 1..=depth {
        let m = 1usize << level;
        let band = &coeffs.bands[level as usize - 1];
        a = if n == 1 {
            let mut out = alloc::vec![0.0; m];
            synthesis_step(bank, &a, band, &mut out);
            out
        } else {
            synthesis_step_2d(bank, &a, band, m)
        };
    }
    let norm = 1.0 / sqrt(exp2i(-((n as u32 * depth) as i32)));
    for v in &mut a {
        *v *= norm;
    }
    GridFunction::new(n, depth, a, "wavelet synthesis")
}

/// The single atom `ψ_{(l,j,k)}` sampled on a `J_grid` grid.
pub fn atom(bank: &FilterBank, n: usize, depth: u32, l: u32, j: u32, k: [u32; 2]) -> Result<GridFunction> {
    let mut c = WaveletCoefficients::zeros(n, depth);
    c.set(l, j, k, 1.0)?;
    reconstruct(&c, bank)
}

/// `2^{j(n/2+s)}`, the per-level weight shared by the norm, the set `W` and
/// the projection so that thresholding and the norm agree bit for bit.
pub fn level_weight(n: usize, j: u32, s: f64) -> f64 {
    powf(2.0, j as f64 * (n as f64 / 2.0 + s))
}

/// `‖c(f)‖_s = sup_ω 2^{|ω|(n/2+s)} |c_ω|`.
pub fn lip_wavelet_seminorm(coeffs: &WaveletCoefficients, s: f64) -> f64 {
    (0..coeffs.depth).fold(0.0f64, |m, j| {
        let w = level_weight(coeffs.n, j, s);
        coeffs.bands[j as usize].iter().fold(m, |m, c| m.max(w * c.abs()))
    })
}

/// `|d| + ‖c(f)‖_s`.
pub fn lip_wavelet_norm(coeffs: &WaveletCoefficients, s: f64) -> f64 {
    coeffs.d.abs() + lip_wavelet_seminorm(coeffs, s)
}

/// `(1/|Q|) Σ_{ω ⊆ Q} 4^{|ω|s} c_ω²` for every cube of level `< J_grid`,
/// computed bottom-up. `out[j][flat]`.
pub fn jbmo_box_sums(coeffs: &WaveletCoefficients, s: f64) -> Vec<Vec<f64>> {
    let n = coeffs.n;
    let depth = coeffs.depth;
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(depth as usize);
    for j in (0..depth).rev() {
        let per = 1usize << (n as u32 * j);
        let side = 1usize << j;
        let weight = powf(4.0, j as f64 * s);
        let band = &coeffs.bands[j as usize];
        let below = raw.last();
        let level: Vec<f64> = (0..per)
            .map(|flat| {
                let own: f64 = (0..coeffs.orientations()).map(|l| band[l * per + flat] * band[l * per + flat]).sum();
                let kids = match below {
                    None => 0.0,
                    Some(b) if n == 1 => b[2 * flat] + b[2 * flat + 1],
                    Some(b) => {
                        let (i0, i1) = (flat % side, flat / side);
                        let fine = 2 * side;
                        let base = 2 * i1 * fine + 2 * i0;
                        b[base] + b[base + 1] + b[base + fine] + b[base + fine + 1]
                    }
                };
                weight * own + kids
            })
            .collect();
        raw.push(level);
    }
    raw.reverse();
    for (j, level) in raw.iter_mut().enumerate() {
        let inv_volume = exp2i((n * j) as i32);
        for v in level.iter_mut() {
            *v *= inv_volume;
        }
    }
    raw
}

/// `|d| + sup_Q ((1/|Q|) Σ_{ω ⊆ Q} 4^{|ω|s} c_ω²)^{1/2}`.
pub fn jbmo_wavelet_norm(coeffs: &WaveletCoefficients, s: f64) -> f64 {
    let sup = jbmo_box_sums(coeffs, s)
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v));
    coeffs.d.abs() + sqrt(sup)
}

/// `T(s,f,ε)`: cells `T(Q)` with `max_l |c_{(l,Q)}| > ε·2^{−τ(Q)(n/2+s)}`,
/// levels `0..J_grid−1`.
pub fn build_t(coeffs: &WaveletCoefficients, s: f64, eps: f64) -> HalfSpaceSet {
    build_t_to(coeffs, s, eps, coeffs.depth.saturating_sub(1))
}

/// [`build_t`] restricted to levels `≤ j_max`.
pub fn build_t_to(coeffs: &WaveletCoefficients, s: f64, eps: f64, j_max: u32) -> HalfSpaceSet {
    let j_max = j_max.min(coeffs.depth.saturating_sub(1));
    let levels = (0..=j_max)
        .map(|j| {
            let w = level_weight(coeffs.n, j, s);
            coeffs.level_max(j).into_iter().map(|m| w * m > eps).collect()
        })
        .collect();
    HalfSpaceSet::from_levels(coeffs.n, levels).expect("levels built with set shape")
}

/// Keeps `c_ω` for `ω` over cubes of `W(s,f,ε)` and `d`; zeroes the rest.
/// Every discarded coefficient satisfies `2^{|ω|(n/2+s)}|c_ω| ≤ ε`, hence
/// `‖c(f) − c(g)‖_s ≤ ε`.
pub fn truncate_projection(coeffs: &WaveletCoefficients, s: f64, eps: f64) -> WaveletCoefficients {
    let mut g = coeffs.clone();
    for j in 0..coeffs.depth {
        let per = 1usize << (coeffs.n as u32 * j);
        let w = level_weight(coeffs.n, j, s);
        let keep: Vec<bool> = coeffs.level_max(j).into_iter().map(|m| w * m > eps).collect();
        let band = &mut g.bands[j as usize];
        for (i, c) in band.iter_mut().enumerate() {
            if !keep[i % per] {
                *c = 0.0;
            }
        }
    }
    g
}
