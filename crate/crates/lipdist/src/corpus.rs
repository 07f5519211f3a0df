//! The shipped test corpus.

/// What a corpus function is expected to do under the distance pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Trig polynomials: smooth, distance 0.
    Smooth,
    /// Single wavelet atoms: finite sets, distance 0.
    Atom,
    /// Weierstrass and lacunary series of exponent `s`: distance comparable to the norm.
    Lacunary { s_tenths: u8 },
    /// Logarithmic singularity and mixtures; no expectation asserted.
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub name: &'static str,
    pub spec: String,
    pub class: Class,
}

impl Entry {
    /// The exponent of a lacunary series, if this is one.
    pub fn lacunary_s(&self) -> Option<f64> {
        match self.class {
            Class::Lacunary { s_tenths } => Some(s_tenths as f64 / 10.0),
            _ => None,
        }
    }
}

/// Twelve functions on the grid of depth `jgrid`; lacunary series use every
/// frequency the grid resolves (`levels = jgrid − 2`).
pub fn corpus(n: usize, jgrid: u32) -> Vec<Entry> {
    let l = jgrid - 2;
    let (k1, k3, k2, k5) = if n == 1 {
        ("1", "3", "2", "5")
    } else {
        ("1,0", "2,1", "0,2", "3,-2")
    };
    let atom_k = |a: u32, b: u32| if n == 1 { format!("{a}") } else { format!("{a},{b}") };
    let e = |name, spec: String, class| Entry { name, spec, class };
    vec![
        e("cos1", format!("trig k={k1} a=1"), Class::Smooth),
        e("cos3", format!("trig k={k3} a=1 phase=0.4"), Class::Smooth),
        e("trig2", format!("sum trig k={k2} a=1 + trig k={k5} a=0.25"), Class::Smooth),
        e("weier05", format!("weierstrass s=0.5 levels={l}"), Class::Lacunary { s_tenths: 5 }),
        e("weier10", format!("weierstrass s=1 levels={l}"), Class::Lacunary { s_tenths: 10 }),
        e(
            "weier05r",
            format!("weierstrass s=0.5 levels={l} seed=7 signs=random"),
            Class::Lacunary { s_tenths: 5 },
        ),
        e("lac05", format!("lacunary-random s=0.5 levels={l} seed=1"), Class::Lacunary { s_tenths: 5 }),
        e("lac10", format!("lacunary-random s=1 levels={l} seed=2"), Class::Lacunary { s_tenths: 10 }),
        e("xlogx", "xlogx".into(), Class::Other),
        e("atom3", format!("wavelet-atom l=1 j=3 k={}", atom_k(2, 5)), Class::Atom),
        e("atom5", format!("wavelet-atom l=1 j=5 k={}", atom_k(9, 20)), Class::Atom),
        e("weier10+xlogx", format!("sum weierstrass s=1 levels={l} + xlogx"), Class::Other),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use lipdist_core::gridfn::{parse_function_spec, synthesize};

    #[test]
    fn every_entry_synthesizes() {
        for (n, j) in [(1, 8), (1, 14), (2, 7)] {
            let c = corpus(n, j);
            assert_eq!(c.len(), 12);
            for e in c {
                let spec = parse_function_spec(&e.spec).unwrap_or_else(|err| panic!("{}: {err}", e.spec));
                synthesize(&spec, n, j).unwrap_or_else(|err| panic!("{}: {err}", e.spec));
            }
        }
    }
}
