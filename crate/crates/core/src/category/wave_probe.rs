//! Finite scans of `n + h(n·x)` for a periodic wave `h`, or of
//! `n + frac(n·x)`, over rational `x` in `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{frac, from_u64, serde_str};
use crate::exact::{format_rational, PatternSet, Rational};
use crate::sequence::WaveShape;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum WaveVariant {
    Wave { shape: WaveShape },
    Frac,
}

impl WaveVariant {
    pub fn term(&self, n: u64, x: &Rational) -> Rational {
        let nr = from_u64(n);
        let y = &nr * x;
        let h = match self {
            WaveVariant::Wave { shape } => shape.eval(&y),
            WaveVariant::Frac => frac(&y),
        };
        nr + h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum WaveProbeOutcome {
    Witness {
        #[serde(with = "serde_str")]
        x: Rational,
        /// The first hits: `(n, n + h(n·x))`.
        hits: Vec<(u64, String)>,
    },
    Exhausted {
        candidates: u64,
        horizon: u64,
    },
}

/// Farey fractions of order `d` in `[0, 1]`, ascending.
pub fn farey(d: u64) -> Vec<Rational> {
    if d == 0 {
        return Vec::new();
    }
    let (mut a, mut b, mut c, mut e) = (0u64, 1u64, 1u64, d);
    let mut out = vec![Rational::new(0.into(), 1.into())];
    while c <= d {
        let k = (d + b) / e;
        let (na, nb) = (c, e);
        c = k * c - a;
        e = k * e - b;
        a = na;
        b = nb;
        out.push(Rational::new(a.into(), b.into()));
    }
    out
}

/// The first Farey `x` (order `denominator_bound`) for which at least
/// `hits` of the indices `n < horizon` land in `U`.
pub fn wave_family_probe(
    set: &PatternSet,
    variant: &WaveVariant,
    denominator_bound: u64,
    hits: usize,
    horizon: u64,
) -> Result<WaveProbeOutcome> {
    if hits == 0 {
        return Err(Error::invalid("hits must be at least 1"));
    }
    if !set.unbounded_above() {
        return Err(Error::invalid("set must be unbounded above"));
    }
    let grid = farey(denominator_bound);
    for x in &grid {
        let found: Vec<(u64, String)> = (0..horizon)
            .filter_map(|n| {
                let t = variant.term(n, x);
                set.member(&t).then(|| (n, format_rational(&t)))
            })
            .take(hits)
            .collect();
        if found.len() == hits {
            return Ok(WaveProbeOutcome::Witness { x: x.clone(), hits: found });
        }
    }
    Ok(WaveProbeOutcome::Exhausted {
        candidates: grid.len() as u64,
        horizon,
    })
}
