//! One-line function descriptions, e.g. `weierstrass s=0.7 levels=12 seed=0`.
//!
//! ```text
//! trig k=<int>[,<int>] a=<real> [phase=<real>]
//! weierstrass s=<real> levels=<int> [seed=<int>] [signs=random|plus]
//! lacunary-random s=<real> levels=<int> seed=<int>
//! xlogx [eps=<real>]
//! wavelet-atom l=<int> j=<int> k=<int>[,<int>]
//! sum <spec> + <spec> [+ <spec> …]
//! file path=<path>
//! ```

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signs {
    Plus,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `a·cos(2π k·x + phase)`; a single frequency on a 2-D grid means `(k, 0)`.
    Trig {
        freq: Vec<i64>,
        amplitude: f64,
        phase: f64,
    },
    /// `Σ_{j=0}^{levels} ±2^{-js} cos(2π 2^j x·u)` with `u = 1` (n = 1) or `(1,1)` (n = 2).
    Weierstrass {
        s: f64,
        levels: u32,
        seed: u64,
        signs: Signs,
    },
    /// Lacunary series with seeded random phases (and directions for n = 2).
    LacunaryRandom { s: f64, levels: u32, seed: u64 },
    /// `sin(2πx)·log(|sin πx| + eps)`, a periodic `x log x` profile at the origin.
    XLogX { eps: f64 },
    /// A single periodized wavelet `ψ_{(l,j,k)}` of the configured filter bank.
    WaveletAtom {
        orientation: u32,
        level: u32,
        index: Vec<u64>,
    },
    Sum(Vec<FunctionSpec>),
    File { path: String },
}

impl FunctionSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::Trig { .. } => "trig",
            FunctionSpec::Weierstrass { .. } => "weierstrass",
            FunctionSpec::LacunaryRandom { .. } => "lacunary-random",
            FunctionSpec::XLogX { .. } => "xlogx",
            FunctionSpec::WaveletAtom { .. } => "wavelet-atom",
            FunctionSpec::Sum(_) => "sum",
            FunctionSpec::File { .. } => "file",
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
    parts.join(",")
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Trig {
                freq,
                amplitude,
                phase,
            } => {
                write!(f, "trig k={} a={amplitude:?}", join(freq))?;
                if *phase != 0.0 {
                    write!(f, " phase={phase:?}")?;
                }
                Ok(())
            }
            FunctionSpec::Weierstrass {
                s,
                levels,
                seed,
                signs,
            } => {
                write!(f, "weierstrass s={s:?} levels={levels} seed={seed}")?;
                if *signs == Signs::Random {
                    write!(f, " signs=random")?;
                }
                Ok(())
            }
            FunctionSpec::LacunaryRandom { s, levels, seed } => {
                write!(f, "lacunary-random s={s:?} levels={levels} seed={seed}")
            }
            FunctionSpec::XLogX { eps } => write!(f, "xlogx eps={eps:?}"),
            FunctionSpec::WaveletAtom {
                orientation,
                level,
                index,
            } => write!(f, "wavelet-atom l={orientation} j={level} k={}", join(index)),
            FunctionSpec::Sum(parts) => {
                write!(f, "sum")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " +")?;
                    }
                    write!(f, " {p}")?;
                }
                Ok(())
            }
            FunctionSpec::File { path } => write!(f, "file path={path}"),
        }
    }
}

/// Whitespace-separated token with its byte offset in the original text.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    at: usize,
    text: &'a str,
}

fn tokenize(text: &str, base: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    at: base + s,
                    text: &text[s..i],
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            at: base + s,
            text: &text[s..],
        });
    }
    out
}

fn syntax(at: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position: at,
        message: message.into(),
    }
}

struct Params<'a> {
    kind: Token<'a>,
    pairs: Vec<(Token<'a>, &'a str, usize)>,
}

impl<'a> Params<'a> {
    fn collect(kind: Token<'a>, rest: &[Token<'a>], allowed: &[&str]) -> Result<Self> {
        let mut pairs: Vec<(Token<'a>, &'a str, usize)> = Vec::new();
        for tok in rest {
            let Some(eq) = tok.text.find('=') else {
                return Err(syntax(tok.at, alloc::format!("expected key=value, found `{}`", tok.text)));
            };
            let key = &tok.text[..eq];
            let value = &tok.text[eq + 1..];
            if !allowed.contains(&key) {
                return Err(syntax(
                    tok.at,
                    alloc::format!("unknown parameter `{key}` for `{}`", kind.text),
                ));
            }
            if pairs.iter().any(|(k, _, _)| k.text[..k.text.find('=').unwrap()] == *key) {
                return Err(syntax(tok.at, alloc::format!("duplicate parameter `{key}`")));
            }
            if value.is_empty() {
                return Err(syntax(tok.at + eq + 1, alloc::format!("empty value for `{key}`")));
            }
            pairs.push((*tok, value, tok.at + eq + 1));
        }
        Ok(Params { kind, pairs })
    }

    fn raw(&self, key: &str) -> Option<(&'a str, usize)> {
        self.pairs
            .iter()
            .find(|(t, _, _)| t.text.split('=').next() == Some(key))
            .map(|(_, v, at)| (*v, *at))
    }

    fn required(&self, key: &str) -> Result<(&'a str, usize)> {
        self.raw(key).ok_or_else(|| {
            syntax(
                self.kind.at + self.kind.text.len(),
                alloc::format!("`{}` requires `{key}=`", self.kind.text),
            )
        })
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|(v, at)| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| syntax(at, alloc::format!("`{v}` is not a finite real")))
            })
            .transpose()
    }

    fn int<T: core::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|(v, at)| v.parse::<T>().map_err(|_| syntax(at, alloc::format!("`{v}` is not an integer"))))
            .transpose()
    }

    fn int_list<T: core::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let (v, at) = self.required(key)?;
        let mut out = Vec::new();
        let mut offset = 0;
        for part in v.split(',') {
            out.push(
                part.parse::<T>()
                    .map_err(|_| syntax(at + offset, alloc::format!("`{part}` is not an integer")))?,
            );
            offset += part.len() + 1;
        }
        if out.len() > 2 {
            return Err(syntax(at, "at most two components (n ≤ 2)"));
        }
        Ok(out)
    }
}

fn exponent(p: &Params<'_>) -> Result<f64> {
    let (_, at) = p.required("s")?;
    let s = p.real("s")?.unwrap_or_default();
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::range("s", alloc::format!("s = {s} at position {at}; need 0 < s ≤ 1")));
    }
    Ok(s)
}

fn levels(p: &Params<'_>) -> Result<u32> {
    p.required("levels")?;
    let levels: u32 = p.int("levels")?.unwrap_or_default();
    if levels < 1 {
        return Err(Error::range("levels", "levels must be at least 1"));
    }
    Ok(levels)
}

fn parse_single(text: &str, base: usize) -> Result<FunctionSpec> {
    let tokens = tokenize(text, base);
    let Some((&kind, rest)) = tokens.split_first() else {
        return Err(syntax(base, "empty function description"));
    };
    match kind.text {
        "trig" => {
            let p = Params::collect(kind, rest, &["k", "a", "phase"])?;
            let freq = p.int_list::<i64>("k")?;
            p.required("a")?;
            Ok(FunctionSpec::Trig {
                freq,
                amplitude: p.real("a")?.unwrap_or(1.0),
                phase: p.real("phase")?.unwrap_or(0.0),
            })
        }
        "weierstrass" => {
            let p = Params::collect(kind, rest, &["s", "levels", "seed", "signs"])?;
            let signs = match p.raw("signs") {
                None | Some(("plus", _)) => Signs::Plus,
                Some(("random", _)) => Signs::Random,
                Some((other, at)) => {
                    return Err(syntax(at, alloc::format!("signs must be `random` or `plus`, got `{other}`")))
                }
            };
            Ok(FunctionSpec::Weierstrass {
                s: exponent(&p)?,
                levels: levels(&p)?,
                seed: p.int("seed")?.unwrap_or(0),
                signs,
            })
        }
        "lacunary-random" => {
            let p = Params::collect(kind, rest, &["s", "levels", "seed"])?;
            p.required("seed")?;
            Ok(FunctionSpec::LacunaryRandom {
                s: exponent(&p)?,
                levels: levels(&p)?,
                seed: p.int("seed")?.unwrap_or(0),
            })
        }
        "xlogx" => {
            let p = Params::collect(kind, rest, &["eps"])?;
            let eps = p.real("eps")?.unwrap_or(0.0);
            if eps < 0.0 {
                return Err(Error::range("eps", "eps must be nonnegative"));
            }
            Ok(FunctionSpec::XLogX { eps })
        }
        "wavelet-atom" => {
            let p = Params::collect(kind, rest, &["l", "j", "k"])?;
            p.required("l")?;
            p.required("j")?;
            let orientation: u32 = p.int("l")?.unwrap_or(0);
            if !(1..=3).contains(&orientation) {
                return Err(Error::range("l", "orientation must be in 1..=2^n-1"));
            }
            Ok(FunctionSpec::WaveletAtom {
                orientation,
                level: p.int("j")?.unwrap_or(0),
                index: p.int_list::<u64>("k")?,
            })
        }
        "file" => {
            let p = Params::collect(kind, rest, &["path"])?;
            Ok(FunctionSpec::File {
                path: p.required("path")?.0.to_string(),
            })
        }
        "sum" => Err(syntax(kind.at, "nested `sum` is not supported")),
        other => Err(syntax(kind.at, alloc::format!("unknown function kind `{other}`"))),
    }
}

/// Parses and validates one function description.
pub fn parse_function_spec(text: &str) -> Result<FunctionSpec> {
    let tokens = tokenize(text, 0);
    match tokens.first() {
        Some(t) if t.text == "sum" => {
            let mut parts = Vec::new();
            let mut start = t.at + t.text.len();
            let plus: Vec<Token<'_>> = tokens[1..].iter().copied().filter(|t| t.text == "+").collect();
            for sep in plus.iter().map(|t| t.at).chain(core::iter::once(text.len())) {
                let piece = &text[start..sep];
                if piece.trim().is_empty() {
                    return Err(syntax(start, "empty operand in `sum`"));
                }
                parts.push(parse_single(piece, start)?);
                start = sep + 1;
            }
            if parts.len() < 2 {
                return Err(syntax(t.at, "`sum` needs at least two operands joined by `+`"));
            }
            Ok(FunctionSpec::Sum(parts))
        }
        _ => parse_single(text, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trig_grammar() {
        assert_eq!(
            parse_function_spec("trig k=1 a=1").unwrap(),
            FunctionSpec::Trig {
                freq: alloc::vec![1],
                amplitude: 1.0,
                phase: 0.0
            }
        );
        assert_eq!(
            parse_function_spec("trig k=2,-3 a=0.5 phase=1.5").unwrap(),
            FunctionSpec::Trig {
                freq: alloc::vec![2, -3],
                amplitude: 0.5,
                phase: 1.5
            }
        );
    }

    #[test]
    fn weierstrass_grammar() {
        assert_eq!(
            parse_function_spec("weierstrass s=0.7 levels=12 seed=0").unwrap(),
            FunctionSpec::Weierstrass {
                s: 0.7,
                levels: 12,
                seed: 0,
                signs: Signs::Plus
            }
        );
        let err = parse_function_spec("weierstrass s=1.5 levels=4").unwrap_err();
        assert!(matches!(err, Error::OutOfRange { what: "s", .. }));
        assert!(parse_function_spec("weierstrass s=0 levels=4").is_err());
        assert!(parse_function_spec("weierstrass s=0.5 levels=0").is_err());
    }

    #[test]
    fn sum_and_positions() {
        let spec = parse_function_spec("sum trig k=1 a=1 + weierstrass s=1 levels=3").unwrap();
        let FunctionSpec::Sum(parts) = spec else { panic!() };
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[1].kind(), "weierstrass");

        match parse_function_spec("trig k=1 a=1 bogus=2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 13),
            other => panic!("{other:?}"),
        }
        match parse_function_spec("sum trig k=1 a=x + xlogx") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 15),
            other => panic!("{other:?}"),
        }
        assert!(parse_function_spec("sum trig k=1 a=1").is_err());
        assert!(parse_function_spec("sum trig k=1 a=1 + ").is_err());
        assert!(parse_function_spec("").is_err());
        assert!(parse_function_spec("cosine k=1").is_err());
        assert!(parse_function_spec("trig k=1 a=1 a=2").is_err());
        assert!(parse_function_spec("lacunary-random s=0.5 levels=3").is_err());
    }

    #[test]
    fn other_kinds() {
        assert_eq!(
            parse_function_spec("xlogx").unwrap(),
            FunctionSpec::XLogX { eps: 0.0 }
        );
        assert_eq!(
            parse_function_spec("wavelet-atom l=1 j=3 k=2").unwrap(),
            FunctionSpec::WaveletAtom {
                orientation: 1,
                level: 3,
                index: alloc::vec![2]
            }
        );
        assert_eq!(
            parse_function_spec("file path=/tmp/x.txt").unwrap(),
            FunctionSpec::File {
                path: "/tmp/x.txt".into()
            }
        );
        assert!(parse_function_spec("wavelet-atom l=0 j=1 k=0").is_err());
    }

    fn arb_single() -> impl Strategy<Value = FunctionSpec> {
        prop_oneof![
            (prop::collection::vec(-50i64..50, 1..=2), -10.0f64..10.0, -3.0f64..3.0).prop_map(
                |(freq, amplitude, phase)| FunctionSpec::Trig {
                    freq,
                    amplitude,
                    phase
                }
            ),
            (0.01f64..=1.0, 1u32..20, any::<u64>(), any::<bool>()).prop_map(|(s, levels, seed, r)| {
                FunctionSpec::Weierstrass {
                    s,
                    levels,
                    seed,
                    signs: if r { Signs::Random } else { Signs::Plus },
                }
            }),
            (0.01f64..=1.0, 1u32..20, any::<u64>())
                .prop_map(|(s, levels, seed)| FunctionSpec::LacunaryRandom { s, levels, seed }),
            (0.0f64..1.0).prop_map(|eps| FunctionSpec::XLogX { eps }),
            (1u32..=3, 0u32..10, prop::collection::vec(0u64..100, 1..=2)).prop_map(|(orientation, level, index)| {
                FunctionSpec::WaveletAtom {
                    orientation,
                    level,
                    index,
                }
            }),
        ]
    }

    proptest! {
        #[test]
        fn display_round_trips(spec in prop_oneof![
            arb_single(),
            prop::collection::vec(arb_single(), 2..4).prop_map(FunctionSpec::Sum),
        ]) {
            let text = alloc::format!("{spec}");
            prop_assert_eq!(parse_function_spec(&text).unwrap(), spec);
        }
    }
}
