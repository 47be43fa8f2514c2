use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use super::interval::{Endpoint, Interval};
use super::rational::Rational;
use crate::error::{Error, Result};

/// A finite union of pairwise disjoint open intervals, sorted by lower
/// endpoint. Two components may share an endpoint (that point belongs to
/// neither), but never overlap.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct OpenSet {
    components: Vec<Interval>,
}

#[derive(Deserialize)]
struct RawOpenSet {
    components: Vec<Interval>,
}

impl<'de> Deserialize<'de> for OpenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawOpenSet::deserialize(d)?;
        Ok(OpenSet::from_intervals(raw.components))
    }
}

impl OpenSet {
    pub fn empty() -> Self {
        OpenSet::default()
    }

    /// Normalizes a raw list of `(lo, hi)` pairs, rejecting any with `lo >= hi`.
    pub fn normalize<I, A, B>(raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<Endpoint>,
        B: Into<Endpoint>,
    {
        let intervals = raw.into_iter().map(|(a, b)| Interval::new(a, b)).collect::<Result<Vec<_>>>()?;
        Ok(OpenSet::from_intervals(intervals))
    }

    /// Normalizes already-validated intervals.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> Self {
        intervals.sort_by(|a, b| a.lo().cmp(b.lo()).then_with(|| a.hi().cmp(b.hi())));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for next in intervals {
            match merged.last_mut() {
                // overlap: next starts strictly before the current one ends
                Some(last) if next.lo() < last.hi() => {
                    if next.hi() > last.hi() {
                        *last = Interval::new(last.lo().clone(), next.hi().clone()).expect("merged interval is nonempty");
                    }
                }
                _ => merged.push(next),
            }
        }
        OpenSet { components: merged }
    }

    pub fn single(interval: Interval) -> Self {
        OpenSet {
            components: vec![interval],
        }
    }

    pub fn components(&self) -> &[Interval] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component containing `x`, if any.
    pub fn component_of(&self, x: &Rational) -> Option<usize> {
        // first component whose lower endpoint is not below x
        let idx = self.components.partition_point(|c| c.lo().cmp_value(x) == Ordering::Less);
        if idx == 0 {
            return None;
        }
        let cand = &self.components[idx - 1];
        (cand.hi().cmp_value(x) == Ordering::Greater).then_some(idx - 1)
    }

    pub fn member(&self, x: &Rational) -> bool {
        self.component_of(x).is_some()
    }

    /// `{scale * x + shift : x in self}`.
    pub fn affine_image(&self, scale: &Rational, shift: &Rational) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::ZeroScale);
        }
        let mut comps: Vec<Interval> = self.components.iter().map(|c| c.affine(scale, shift)).collect();
        if scale.is_negative() {
            comps.reverse();
        }
        Ok(OpenSet { components: comps })
    }

    pub fn union(&self, other: &OpenSet) -> OpenSet {
        let mut all = self.components.clone();
        all.extend(other.components.iter().cloned());
        OpenSet::from_intervals(all)
    }

    pub fn unbounded_above(&self) -> bool {
        self.components.last().is_some_and(|c| *c.hi() == Endpoint::PosInf)
    }

    /// Every `(0, eps)` meets the set. For a finite union this happens
    /// exactly when some component straddles or starts at zero.
    pub fn clustered_at_zero(&self) -> bool {
        let zero = Rational::zero();
        self.components
            .iter()
            .any(|c| c.lo().cmp_value(&zero) != Ordering::Greater && c.hi().cmp_value(&zero) == Ordering::Greater)
    }

    /// Sum of the lengths of the bounded components.
    pub fn finite_measure(&self) -> Rational {
        self.components
            .iter()
            .filter_map(Interval::length)
            .fold(Rational::zero(), |acc, l| acc + l)
    }

    /// Whether the open interval lies inside a single component.
    pub fn covers(&self, interval: &Interval) -> bool {
        self.components.iter().any(|c| interval.is_subset_of(c))
    }

    /// Every component of `self` lies inside some component of `other`.
    pub fn is_subset_of(&self, other: &OpenSet) -> bool {
        self.components.iter().all(|c| other.covers(c))
    }

    /// Components lying entirely inside `(0, inf)`.
    pub fn is_positive(&self) -> bool {
        let zero = Rational::zero();
        self.components.first().is_none_or(|c| c.lo().cmp_value(&zero) != Ordering::Less)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, q};

    fn set(pairs: &[(i64, i64)]) -> OpenSet {
        OpenSet::normalize(pairs.iter().map(|&(a, b)| (int(a), int(b)))).unwrap()
    }

    #[test]
    fn touching_components_stay_separate() {
        let u = set(&[(0, 1), (1, 2)]);
        assert_eq!(u.len(), 2);
        assert!(!u.member(&int(1)));
    }

    #[test]
    fn overlapping_components_merge() {
        let u = set(&[(1, 3), (0, 2)]);
        assert_eq!(u, set(&[(0, 3)]));
        assert!(u.member(&q(7, 3)));
    }

    #[test]
    fn empty_input_gives_empty_set() {
        let u = set(&[]);
        assert!(u.is_empty());
        assert!(!u.member(&int(0)));
    }

    #[test]
    fn nested_components_collapse() {
        assert_eq!(set(&[(0, 10), (2, 3), (4, 5)]), set(&[(0, 10)]));
    }

    #[test]
    fn rejects_degenerate_interval() {
        assert!(OpenSet::normalize([(int(2), int(2))]).is_err());
        assert!(OpenSet::normalize([(int(3), int(2))]).is_err());
    }

    #[test]
    fn member_examples() {
        assert!(set(&[(0, 1)]).member(&q(1, 2)));
        assert!(!set(&[(0, 1), (1, 2)]).member(&int(1)));
    }

    #[test]
    fn affine_examples() {
        let u = set(&[(1, 2)]);
        assert_eq!(u.affine_image(&int(3), &int(0)).unwrap(), set(&[(3, 6)]));
        assert_eq!(u.affine_image(&int(1), &int(-5)).unwrap(), set(&[(-4, -3)]));
        let v = set(&[(0, 1), (2, 3)]);
        assert_eq!(v.affine_image(&int(-1), &int(0)).unwrap(), set(&[(-3, -2), (-1, 0)]));
        assert_eq!(u.affine_image(&int(0), &int(1)), Err(Error::ZeroScale));
    }

    #[test]
    fn reflection_swaps_infinite_ends() {
        let u = OpenSet::normalize([(int(1), Endpoint::PosInf)]).unwrap();
        let r = u.affine_image(&int(-2), &int(0)).unwrap();
        assert_eq!(r.components()[0], Interval::new(Endpoint::NegInf, int(-2)).unwrap());
        assert!(u.unbounded_above());
        assert!(!r.unbounded_above());
    }

    #[test]
    fn derived_predicates() {
        assert!(set(&[(0, 1)]).clustered_at_zero());
        assert!(set(&[(-1, 1)]).clustered_at_zero());
        assert!(!set(&[(1, 2)]).clustered_at_zero());
        assert!(!set(&[(-2, 0)]).clustered_at_zero());
        assert!(!set(&[(0, 1)]).unbounded_above());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let u = OpenSet::normalize([
            (Endpoint::NegInf, Endpoint::Finite(q(-1, 3))),
            (Endpoint::Finite(q(1, 2)), Endpoint::PosInf),
        ])
        .unwrap();
        let text = serde_json::to_string(&u).unwrap();
        assert_eq!(text, r#"{"components":[{"lo":"-inf","hi":"-1/3"},{"lo":"1/2","hi":"+inf"}]}"#);
        let back: OpenSet = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
