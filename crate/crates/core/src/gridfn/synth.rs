use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{FunctionSpec, GridFunction, Signs};
use crate::math::{cos, ln, powf, sin, PI, TAU};
use crate::wavelet::{self, DEFAULT_VANISHING_MOMENTS};
use crate::{Error, Result};

/// Reads the samples behind a `file path=…` spec.
pub type SampleLoader<'a> = &'a dyn Fn(&str) -> core::result::Result<Vec<f64>, String>;

#[derive(Clone, Copy)]
pub struct SynthOptions<'a> {
    /// Filter bank used for `wavelet-atom`.
    pub wavelet_p: usize,
    pub loader: Option<SampleLoader<'a>>,
}

impl Default for SynthOptions<'_> {
    fn default() -> Self {
        SynthOptions {
            wavelet_p: DEFAULT_VANISHING_MOMENTS,
            loader: None,
        }
    }
}

impl core::fmt::Debug for SynthOptions<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SynthOptions")
            .field("wavelet_p", &self.wavelet_p)
            .field("loader", &self.loader.is_some())
            .finish()
    }
}

pub fn synthesize(spec: &FunctionSpec, n: usize, depth: u32) -> Result<GridFunction> {
    synthesize_with(spec, n, depth, &SynthOptions::default())
}

/// Samples the closed form of `spec` at every grid point.
///
/// Cosine terms are evaluated from a table of `cos(2πm/N)` with the phase
/// index `k·i mod N` reduced in integers, so no argument rounding grows with
/// the frequency.
pub fn synthesize_with(spec: &FunctionSpec, n: usize, depth: u32, opts: &SynthOptions<'_>) -> Result<GridFunction> {
    // validates n and depth
    let mut f = GridFunction::constant(n, depth, 0.0)?;
    let table = Phases::new(depth);
    add_terms(spec, &mut f, &table, opts)?;
    Ok(f.with_label(spec.to_string()))
}

struct Phases {
    side: i64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Phases {
    fn new(depth: u32) -> Self {
        let side = 1i64 << depth;
        let angle = |m: i64| TAU * m as f64 / side as f64;
        Phases {
            side,
            cos: (0..side).map(|m| cos(angle(m))).collect(),
            sin: (0..side).map(|m| sin(angle(m))).collect(),
        }
    }

    /// Adds `a·cos(2π k·x + φ)` to every sample.
    fn add_mode(&self, f: &mut GridFunction, k: [i64; 2], amplitude: f64, phase: f64) {
        let (cp, sp) = (amplitude * cos(phase), amplitude * sin(phase));
        let side = self.side;
        let k0 = k[0].rem_euclid(side);
        let k1 = k[1].rem_euclid(side);
        let n = f.n();
        for (flat, v) in f.samples.iter_mut().enumerate() {
            let m = if n == 1 {
                (k0 * flat as i64) % side
            } else {
                let (i0, i1) = (flat as i64 % side, flat as i64 / side);
                (k0 * i0 + k1 * i1) % side
            } as usize;
            *v += cp * self.cos[m] - sp * self.sin[m];
        }
    }
}

fn resolvable(k: [i64; 2], f: &GridFunction, what: &str) -> Result<()> {
    let nyquist = (f.side() / 2) as i64;
    if k[0].abs() >= nyquist || k[1].abs() >= nyquist {
        return Err(Error::UnderResolved(alloc::format!(
            "{what}: frequency {k:?} needs |k| < {nyquist} on a 2^{} grid",
            f.depth()
        )));
    }
    Ok(())
}

fn lacunary_levels(levels: u32, f: &GridFunction) -> Result<()> {
    if levels + 2 > f.depth() {
        return Err(Error::UnderResolved(alloc::format!(
            "{levels} lacunary levels need a grid depth of at least {}, got {}",
            levels + 2,
            f.depth()
        )));
    }
    Ok(())
}

fn add_terms(spec: &FunctionSpec, f: &mut GridFunction, table: &Phases, opts: &SynthOptions<'_>) -> Result<()> {
    let n = f.n();
    match spec {
        FunctionSpec::Trig { freq, amplitude, phase } => {
            let k = match (n, freq.as_slice()) {
                (_, [k]) => [*k, 0],
                (2, [k0, k1]) => [*k0, *k1],
                _ => {
                    return Err(Error::range(
                        "frequency",
                        alloc::format!("{} components for n = {n}", freq.len()),
                    ))
                }
            };
            resolvable(k, f, "trig")?;
            table.add_mode(f, k, *amplitude, *phase);
        }
        FunctionSpec::Weierstrass { s, levels, seed, signs } => {
            lacunary_levels(*levels, f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for j in 0..=*levels {
                let sign = match signs {
                    Signs::Plus => 1.0,
                    Signs::Random => {
                        if rng.gen::<bool>() {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                };
                let k = 1i64 << j;
                let dir = if n == 1 { [k, 0] } else { [k, k] };
                table.add_mode(f, dir, sign * powf(2.0, -(j as f64) * s), 0.0);
            }
        }
        FunctionSpec::LacunaryRandom { s, levels, seed } => {
            lacunary_levels(*levels, f)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            const DIRECTIONS: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [1, -1]];
            for j in 0..=*levels {
                let phase = rng.gen_range(0.0..TAU);
                let u = if n == 1 { [1, 0] } else { DIRECTIONS[rng.gen_range(0..4)] };
                let k = 1i64 << j;
                table.add_mode(f, [k * u[0], k * u[1]], powf(2.0, -(j as f64) * s), phase);
            }
        }
        FunctionSpec::XLogX { eps } => {
            let h = f.spacing();
            let profile = |t: f64| {
                let a = sin(PI * t).abs() + eps;
                if a == 0.0 {
                    0.0
                } else {
                    sin(TAU * t) * ln(a)
                }
            };
            let side = f.side();
            let g: Vec<f64> = (0..side).map(|i| profile(i as f64 * h)).collect();
            for (flat, v) in f.samples.iter_mut().enumerate() {
                *v += if n == 1 { g[flat] } else { g[flat % side] + g[flat / side] };
            }
        }
        FunctionSpec::WaveletAtom { orientation, level, index } => {
            let k = match (n, index.as_slice()) {
                (1, [k]) => [*k, 0],
                (2, [k0, k1]) => [*k0, *k1],
                _ => {
                    return Err(Error::range(
                        "atom index",
                        alloc::format!("{} components for n = {n}", index.len()),
                    ))
                }
            };
            let k = [
                u32::try_from(k[0]).map_err(|_| Error::range("atom index", "too large"))?,
                u32::try_from(k[1]).map_err(|_| Error::range("atom index", "too large"))?,
            ];
            let bank = wavelet::filter_bank(opts.wavelet_p)?;
            let atom = wavelet::atom(&bank, n, f.depth(), *orientation, *level, k)?;
            for (v, a) in f.samples.iter_mut().zip(atom.samples()) {
                *v += a;
            }
        }
        FunctionSpec::Sum(parts) => {
            for part in parts {
                add_terms(part, f, table, opts)?;
            }
        }
        FunctionSpec::File { path } => {
            let loader = opts.loader.ok_or_else(|| Error::MissingSamples(alloc::format!("{path}: no loader")))?;
            let samples = loader(path).map_err(|e| Error::MissingSamples(alloc::format!("{path}: {e}")))?;
            if samples.len() != f.samples.len() {
                return Err(Error::Shape(alloc::format!(
                    "{path} holds {} samples, grid needs {}",
                    samples.len(),
                    f.samples.len()
                )));
            }
            if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
                return Err(Error::range("sample", alloc::format!("{path}: sample {i} is not finite")));
            }
            for (v, a) in f.samples.iter_mut().zip(samples) {
                *v += a;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::parse_function_spec;

    fn synth(text: &str, n: usize, depth: u32) -> Result<GridFunction> {
        synthesize(&parse_function_spec(text).unwrap(), n, depth)
    }

    #[test]
    fn trig_is_direct_evaluation() {
        let f = synth("trig k=1 a=1", 1, 8).unwrap();
        for (m, v) in f.samples().iter().enumerate() {
            assert!((v - cos(TAU * m as f64 / 256.0)).abs() < 1e-15);
        }
        let g = synth("trig k=2,-3 a=0.5 phase=0.25", 2, 5).unwrap();
        for (flat, v) in g.samples().iter().enumerate() {
            let (x0, x1) = ((flat % 32) as f64 / 32.0, (flat / 32) as f64 / 32.0);
            let expect = 0.5 * cos(TAU * (2.0 * x0 - 3.0 * x1) + 0.25);
            assert!((v - expect).abs() < 1e-14);
        }
        assert!(matches!(synth("trig k=8 a=1", 1, 4), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn two_term_weierstrass() {
        let f = synth("weierstrass s=1 levels=1", 1, 6).unwrap();
        for (m, v) in f.samples().iter().enumerate() {
            let x = m as f64 / 64.0;
            assert!((v - (cos(TAU * x) + 0.5 * cos(2.0 * TAU * x))).abs() < 1e-15);
        }
        assert!(matches!(synth("weierstrass s=1 levels=7", 1, 8), Err(Error::UnderResolved(_))));
        assert!(synth("weierstrass s=1 levels=6", 1, 8).is_ok());
    }

    #[test]
    fn sum_is_pointwise() {
        let a = synth("weierstrass s=0.5 levels=5 signs=random seed=3", 1, 9).unwrap();
        let b = synth("xlogx eps=0.01", 1, 9).unwrap();
        let c = synth("sum weierstrass s=0.5 levels=5 signs=random seed=3 + xlogx eps=0.01", 1, 9).unwrap();
        for ((x, y), z) in a.samples().iter().zip(b.samples()).zip(c.samples()) {
            assert!((x + y - z).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_random_kinds() {
        for text in ["lacunary-random s=0.5 levels=6 seed=9", "weierstrass s=0.3 levels=6 seed=2 signs=random"] {
            for n in [1, 2] {
                assert_eq!(synth(text, n, 8).unwrap(), synth(text, n, 8).unwrap());
            }
        }
        let a = synth("lacunary-random s=0.5 levels=6 seed=9", 1, 8).unwrap();
        let b = synth("lacunary-random s=0.5 levels=6 seed=10", 1, 8).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn xlogx_shape() {
        let f = synth("xlogx", 1, 8).unwrap();
        assert_eq!(f.samples()[0], 0.0);
        let x = 3.0 / 256.0;
        assert!((f.samples()[3] - sin(TAU * x) * ln(sin(PI * x))).abs() < 1e-15);
        let g = synth("xlogx", 2, 6).unwrap();
        let h = synth("xlogx", 1, 6).unwrap();
        assert!((g.at([5, 7]) - h.samples()[5] - h.samples()[7]).abs() < 1e-15);
    }

    #[test]
    fn atom_and_file() {
        let f = synth("wavelet-atom l=1 j=3 k=2", 1, 10).unwrap();
        assert!((f.l2_norm_sq() - 1.0).abs() < 1e-12);
        assert!(synth("wavelet-atom l=2 j=3 k=2", 1, 10).is_err());
        assert!(synth("wavelet-atom l=1 j=10 k=0", 1, 10).is_err());

        let spec = parse_function_spec("file path=ramp.txt").unwrap();
        assert!(matches!(synthesize(&spec, 1, 4), Err(Error::MissingSamples(_))));
        let loader = |_: &str| Ok((0..16).map(|i| i as f64).collect());
        let opts = SynthOptions {
            loader: Some(&loader),
            ..Default::default()
        };
        let f = synthesize_with(&spec, 1, 4, &opts).unwrap();
        assert_eq!(f.samples()[5], 5.0);
        assert!(matches!(synthesize_with(&spec, 1, 5, &opts), Err(Error::Shape(_))));
    }
}
