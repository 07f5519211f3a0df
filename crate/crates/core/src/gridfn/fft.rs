//! Radix-2 complex FFT on power-of-two lengths, plus the 2-D row/column pass.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::{cos, sin, TAU};

/// Precomputed twiddles and bit-reversal table for one length.
pub(crate) struct Radix2 {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2 {
    pub(crate) fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length must be a power of two");
        let bits = len.trailing_zeros();
        let twiddles = (0..len / 2)
            .map(|k| {
                let t = -TAU * k as f64 / len as f64;
                Complex64::new(cos(t), sin(t))
            })
            .collect();
        let bitrev = (0..len)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        Radix2 {
            len,
            twiddles,
            bitrev,
        }
    }

    /// In-place transform, `X[m] = Σ x[i] e^{∓2πi·mi/N}` (minus sign when `inverse` is false).
    /// No normalization is applied in either direction.
    pub(crate) fn process(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.len;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Unnormalized n-dimensional transform over a `side^n` row-major array.
pub(crate) fn transform(data: &mut [Complex64], n: usize, side: usize, inverse: bool) {
    let plan = Radix2::new(side);
    match n {
        1 => plan.process(data, inverse),
        2 => {
            for row in data.chunks_mut(side) {
                plan.process(row, inverse);
            }
            let mut column = alloc::vec![Complex64::new(0.0, 0.0); side];
            for c in 0..side {
                for r in 0..side {
                    column[r] = data[r * side + c];
                }
                plan.process(&mut column, inverse);
                for r in 0..side {
                    data[r * side + c] = column[r];
                }
            }
        }
        _ => unreachable!("dimension validated by GridFunction"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|m| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let t = -TAU * ((m * i) % n) as f64 / n as f64;
                        v * Complex64::new(cos(t), sin(t))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let x: Vec<Complex64> = (0..32)
            .map(|i| Complex64::new(sin(i as f64 * 0.7) + 0.1 * i as f64, cos(i as f64)))
            .collect();
        let mut y = x.clone();
        Radix2::new(32).process(&mut y, false);
        for (a, b) in y.iter().zip(naive_dft(&x)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn length_one_is_identity() {
        let mut x = [Complex64::new(2.5, -1.0)];
        Radix2::new(1).process(&mut x, false);
        assert_eq!(x[0], Complex64::new(2.5, -1.0));
    }
}
