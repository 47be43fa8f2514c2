//! Sequences diverging to infinity, presented with exact term evaluation
//! and constructive moduli.

mod coverage;
mod generator;
mod probe;
mod wave;

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::exact::{format_rational, Interval, Rational};

pub use coverage::{coverage_covers, coverage_functional};
pub use generator::{make_generator, theorem2_sequence, Generator, SequenceSpec, Theorem2Sequence};
pub use probe::{condition_c_probe, ProbeOutcome};
pub use wave::{Knot, WaveShape};

/// A sequence `a_n → ∞` with exact terms and a divergence modulus.
///
/// The optional capabilities default to a capability error; a sequence
/// that cannot supply them only supports falsification-style queries.
pub trait DivergingSequence: Send + Sync + Debug {
    fn term(&self, n: u64) -> Result<Rational>;

    /// An index `M` with `term(n) > bound` for every `n >= M`.
    fn divergence_modulus(&self, bound: &Rational) -> Result<u64>;

    /// An index `E` with `term(n) <= lo` for every `n < E`. Used to skip a
    /// provably irrelevant prefix when enumerating a window.
    fn entry_index(&self, _lo: &Rational) -> Result<u64> {
        Ok(0)
    }

    /// An index `N` such that every gap `|term(n+1) - term(n)|` with
    /// `n >= N` is below `eps`.
    fn gap_modulus(&self, _eps: &Rational) -> Result<u64> {
        Err(Error::capability("gap_modulus", "sequence provides no gap modulus"))
    }

    /// The maximum of the gaps `term(n+1) - term(n)` over `n >= from`
    /// (attained, so `< bound` tests on it are exact).
    fn tail_gap_bound(&self, _from: u64) -> Result<Rational> {
        Err(Error::capability("tail_gap_bound", "sequence provides no tail gap bound"))
    }

    /// Known non-decreasing, so index searches may bisect.
    fn is_monotone(&self) -> bool {
        false
    }

    /// Terms are rational enclosure midpoints rather than exact values.
    fn is_approximate(&self) -> bool {
        false
    }

    /// `term(n)` for `start <= n < end`.
    fn terms_range(&self, start: u64, end: u64) -> Result<Vec<Rational>> {
        (start..end).map(|n| self.term(n)).collect()
    }
}

/// All `(n, term(n))` with `term(n)` inside the window, which must have a
/// finite upper end. Complete by soundness of the divergence modulus.
pub fn terms_in(s: &dyn DivergingSequence, window: &Interval) -> Result<Vec<(u64, Rational)>> {
    let hi = window
        .hi()
        .finite()
        .ok_or_else(|| Error::invalid("terms_in needs a window with finite upper end"))?;
    let end = s.divergence_modulus(hi)?;
    let start = match window.lo().finite() {
        Some(lo) => s.entry_index(lo)?.min(end),
        None => 0,
    };
    let terms = s.terms_range(start, end)?;
    // spot check of the modulus at its own boundary
    let boundary = s.term(end)?;
    if boundary <= *hi {
        return Err(Error::capability(
            "divergence_modulus",
            format!(
                "unsound modulus: term({end}) = {} is not above {}",
                format_rational(&boundary),
                format_rational(hi)
            ),
        ));
    }
    Ok((start..end).zip(terms).filter(|(_, t)| window.contains(t)).collect())
}

/// Least `n >= from` with `term(n) > bound`.
pub fn first_index_above(s: &dyn DivergingSequence, bound: &Rational, from: u64) -> Result<u64> {
    let end = s.divergence_modulus(bound)?.max(from);
    if s.is_monotone() {
        if s.term(from)? > *bound {
            return Ok(from);
        }
        // term(lo) <= bound < term(hi)
        let (mut lo, mut hi) = (from, end);
        if s.term(hi)? <= *bound {
            return Err(Error::capability("divergence_modulus", "unsound modulus"));
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if s.term(mid)? > *bound {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(hi);
    }
    for n in from..=end {
        if s.term(n)? > *bound {
            return Ok(n);
        }
    }
    Err(Error::capability("divergence_modulus", "unsound modulus"))
}

/// A finite, ordered, non-empty family of sequences.
#[derive(Debug, Clone)]
pub struct SequenceFamily {
    members: Vec<Generator>,
}

impl SequenceFamily {
    pub fn new(members: Vec<Generator>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("sequence family must be non-empty"));
        }
        Ok(SequenceFamily { members })
    }

    pub fn from_specs(specs: &[SequenceSpec]) -> Result<Self> {
        SequenceFamily::new(specs.iter().map(make_generator).collect::<Result<_>>()?)
    }

    pub fn members(&self) -> &[Generator] {
        &self.members
    }

    pub fn specs(&self) -> Vec<SequenceSpec> {
        self.members.iter().map(|g| g.spec().clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_approximate(&self) -> bool {
        self.members.iter().any(|m| m.is_approximate())
    }
}
