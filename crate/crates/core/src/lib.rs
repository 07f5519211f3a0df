//! Distance from Hölder–Zygmund functions to the bmo-Sobolev subspace.
//!
//! Everything here works on periodic functions sampled on a dyadic grid of the
//! torus `[0,1)^n` (`n` is 1 or 2). Three independent characterizations of the
//! distance are computed and compared:
//!
//! * [`secdiff`]: maximal second differences `Δ₂f(x,y)` against `ε·y^s`,
//! * [`wavelet`]: periodized Daubechies coefficients against `ε·2^{-j(n/2+s)}`,
//! * [`poisson`]: `y^{2-s}|∂²u/∂y²|` of the harmonic (Poisson) extension.
//!
//! Each produces a union of Whitney cells in the upper half-space
//! ([`dyadic::HalfSpaceSet`]) whose Carleson functional is evaluated exactly
//! per depth by [`dyadic::carleson_sup`]. The [`distance`] module turns the
//! depth profiles into critical thresholds `ε₀` and compares the methods.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, reports and the
//! command line live in the companion `lipdist` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod math;

pub mod distance;
pub mod dyadic;
pub mod gridfn;
pub mod poisson;
pub mod secdiff;
pub mod wavelet;

pub use error::{Error, Result};
pub use gridfn::{FunctionSpec, GridFunction, SpectralFunction};
