use num_bigint::BigInt;
use num_traits::Zero;

use super::DivergingSequence;
use crate::error::{Error, Result};
use crate::exact::rational::{ceil, from_u64, to_index, Rational};

/// Whether the radius-`r` neighbourhoods of the terms cover `(i, ∞)`.
///
/// The complement of `⋃ (a_n - r, a_n + r)` is `(-∞, a_0 - r]` together with
/// the closed cores `[a_n + r, a_{n+1} - r]` of gaps at least `2r` wide. A core
/// meets `(i, ∞)` iff `a_{n+1} - r > i`, so only gaps from the first such `n`
/// on matter, and their maximum is the tail gap bound.
pub fn coverage_covers(s: &dyn DivergingSequence, i: &Rational, r: &Rational) -> Result<bool> {
    let first = s.term(0)?;
    if &first - r > *i {
        return Ok(false);
    }
    let n_star = first_relevant_gap(s, &(i + r))?;
    let bound = s.tail_gap_bound(n_star)?;
    Ok(bound < r * Rational::from_integer(2.into()))
}

/// Least `n` with `term(n + 1) > threshold`, checking strict increase on
/// the scanned stretch.
fn first_relevant_gap(s: &dyn DivergingSequence, threshold: &Rational) -> Result<u64> {
    let start = s.entry_index(threshold)?.saturating_sub(1);
    let end = s.divergence_modulus(threshold)?;
    let mut prev = s.term(start)?;
    for n in start..end.max(start + 1) {
        let next = s.term(n + 1)?;
        if next <= prev {
            return Err(Error::NotIncreasing { index: n + 1 });
        }
        if next > *threshold {
            return Ok(n);
        }
        prev = next;
    }
    Err(Error::capability(
        "divergence_modulus",
        "no term above the threshold before the modulus index",
    ))
}

const MAX_RADIUS_DENOMINATOR: u64 = 1 << 48;

/// `f_{a_n}(i)`: the largest `j >= 1` such that radius `1/j` covers
/// `(i, ∞)`, or 0 when even radius 1 does not.
pub fn coverage_functional(s: &dyn DivergingSequence, i: u64) -> Result<u64> {
    let threshold = from_u64(i);
    // for radii below every gap past i, coverage must fail; that caps the search
    let n0 = first_relevant_gap(s, &threshold)?;
    let g0 = s.tail_gap_bound(n0)?;
    if g0 <= Rational::zero() {
        return Err(Error::NotIncreasing { index: n0 + 1 });
    }
    // radius 1/j <= g0/2 leaves the gap at n0 open whenever it is still relevant
    let j_cap = to_index(&ceil(&(Rational::from_integer(BigInt::from(2)) / &g0)))?;
    let covers = |j: u64| coverage_covers(s, &threshold, &Rational::new(1.into(), BigInt::from(j)));
    if !covers(1)? {
        return Ok(0);
    }
    // covers(j) is monotone: true on 1..=J, false afterwards. The gap at n0
    // may fall out of view for larger radii, so j_cap is only a first guess.
    let (mut lo, mut hi) = (1u64, j_cap.max(2));
    while covers(hi)? {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .filter(|&h| h <= MAX_RADIUS_DENOMINATOR)
            .ok_or_else(|| Error::capability("tail_gap_bound", "coverage holds for every radius tried"))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if covers(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
