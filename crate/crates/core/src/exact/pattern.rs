//! Open sets with infinitely many components: a finite head plus one
//! lazily enumerated tail, either shrinking geometrically toward zero or
//! marching off to infinity along `c·m^e`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use super::interval::{Endpoint, Interval};
use super::open_set::OpenSet;
use super::rational::{serde_str, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Tail {
    /// `⋃_{m>=0} ratio^m · cell`, with `0 < ratio < 1` and `cell` bounded and
    /// away from zero.
    Geometric {
        #[serde(with = "serde_str")]
        ratio: Rational,
        cell: OpenSet,
    },
    /// `⋃_{m>=from} (coeff·m^exponent + lo, coeff·m^exponent + hi)`, pairwise disjoint.
    Power {
        #[serde(with = "serde_str")]
        coeff: Rational,
        exponent: u32,
        #[serde(with = "serde_str")]
        lo: Rational,
        #[serde(with = "serde_str")]
        hi: Rational,
        #[serde(default)]
        from: u64,
    },
}

impl Tail {
    fn validate(&self) -> Result<()> {
        match self {
            Tail::Geometric { ratio, cell } => {
                if !ratio.is_positive() || *ratio >= Rational::one() {
                    return Err(Error::invalid("geometric ratio must lie in (0, 1)"));
                }
                let first = cell.components().first().ok_or_else(|| Error::invalid("geometric cell is empty"))?;
                let last = cell.components().last().expect("nonempty");
                if first.lo().cmp_value(&Rational::zero()) != Ordering::Greater || !last.hi().is_finite() {
                    return Err(Error::invalid("geometric cell must be bounded and bounded away from 0"));
                }
            }
            Tail::Power {
                coeff,
                exponent,
                lo,
                hi,
                from,
            } => {
                if !coeff.is_positive() || *exponent == 0 || lo >= hi {
                    return Err(Error::invalid("power tail needs coeff > 0, exponent >= 1, lo < hi"));
                }
                // consecutive offsets only grow, so checking the first pair suffices
                let step = self.power_base(from + 1) - self.power_base(*from);
                if hi - lo > step {
                    return Err(Error::invalid("power tail components overlap"));
                }
            }
        }
        Ok(())
    }

    fn power_base(&self, m: u64) -> Rational {
        match self {
            Tail::Power { coeff, exponent, .. } => coeff * Rational::from_integer(BigInt::from(m).pow(*exponent)),
            Tail::Geometric { .. } => unreachable!("power_base on geometric tail"),
        }
    }

    fn power_component(&self, m: u64) -> Interval {
        match self {
            Tail::Power { lo, hi, .. } => {
                let base = self.power_base(m);
                Interval::finite(&base + lo, base + hi).expect("lo < hi")
            }
            Tail::Geometric { .. } => unreachable!(),
        }
    }

    /// Largest `m >= from` with `base(m) + lo < x`.
    fn power_last_below(&self, x: &Rational) -> Option<u64> {
        let Tail::Power { lo, from, .. } = self else { unreachable!() };
        let below = |m: u64| self.power_base(m) + lo < *x;
        if !below(*from) {
            return None;
        }
        let mut hi = from + 1;
        while below(hi) {
            hi = from + (hi - from) * 2;
        }
        let mut low = *from;
        // below(low) holds, below(hi) fails
        while hi - low > 1 {
            let mid = low + (hi - low) / 2;
            if below(mid) {
                low = mid;
            } else {
                hi = mid;
            }
        }
        Some(low)
    }
}

/// `head ∪ tail`. Membership is exact; the head may overlap the tail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternSet {
    head: OpenSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail: Option<Tail>,
}

// short-lived during deserialization, so the variant size gap is harmless
#[allow(clippy::large_enum_variant)]
#[derive(Deserialize)]
#[serde(untagged)]
enum RawPattern {
    Plain {
        components: Vec<Interval>,
    },
    Pattern {
        #[serde(default)]
        head: OpenSet,
        tail: Option<Tail>,
    },
}

impl<'de> Deserialize<'de> for PatternSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawPattern::deserialize(d)? {
            RawPattern::Plain { components } => Ok(PatternSet::from(OpenSet::from_intervals(components))),
            RawPattern::Pattern { head, tail } => PatternSet::new(head, tail).map_err(serde::de::Error::custom),
        }
    }
}

impl From<OpenSet> for PatternSet {
    fn from(head: OpenSet) -> Self {
        PatternSet { head, tail: None }
    }
}

impl PatternSet {
    pub fn new(head: OpenSet, tail: Option<Tail>) -> Result<Self> {
        if let Some(t) = &tail {
            t.validate()?;
        }
        Ok(PatternSet { head, tail })
    }

    pub fn head(&self) -> &OpenSet {
        &self.head
    }

    pub fn tail(&self) -> Option<&Tail> {
        self.tail.as_ref()
    }

    /// A component (of the head or of the tail pattern) containing `x`.
    pub fn component_containing(&self, x: &Rational) -> Option<Interval> {
        if let Some(i) = self.head.component_of(x) {
            return Some(self.head.components()[i].clone());
        }
        match self.tail.as_ref()? {
            Tail::Geometric { ratio, cell } => {
                if !x.is_positive() {
                    return None;
                }
                let sup = cell.components().last()?.hi().finite()?.clone();
                let mut y = x.clone();
                let mut scale = Rational::one();
                while y < sup {
                    if let Some(i) = cell.component_of(&y) {
                        let c = &cell.components()[i];
                        return Some(c.affine(&scale, &Rational::zero()));
                    }
                    y /= ratio;
                    scale *= ratio;
                }
                None
            }
            tail @ Tail::Power { .. } => {
                let m = tail.power_last_below(x)?;
                let c = tail.power_component(m);
                c.contains(x).then_some(c)
            }
        }
    }

    pub fn member(&self, x: &Rational) -> bool {
        self.component_containing(x).is_some()
    }

    pub fn clustered_at_zero(&self) -> bool {
        matches!(self.tail, Some(Tail::Geometric { .. })) || self.head.clustered_at_zero()
    }

    pub fn unbounded_above(&self) -> bool {
        matches!(self.tail, Some(Tail::Power { .. })) || self.head.unbounded_above()
    }

    /// Contained in `(0, ∞)`.
    pub fn is_positive(&self) -> bool {
        let tail_ok = match &self.tail {
            Some(Tail::Power { lo, from, .. }) => self.tail.as_ref().expect("tail").power_base(*from) + lo >= Rational::zero(),
            _ => true,
        };
        self.head.is_positive() && tail_ok
    }

    /// Among components with lower endpoint below `b`, one whose lower
    /// endpoint is largest; head components win ties.
    pub fn largest_lo_below(&self, b: &Rational) -> Option<Interval> {
        let head = self
            .head
            .components()
            .iter()
            .rev()
            .find(|c| c.lo().cmp_value(b) == Ordering::Less)
            .cloned();
        let tail = match &self.tail {
            None => None,
            Some(Tail::Geometric { ratio, cell }) => {
                let mut best: Option<Interval> = None;
                for c in cell.components() {
                    let mut scale = Rational::one();
                    let lo = c.lo().finite().expect("bounded cell").clone();
                    while &lo * &scale >= *b {
                        scale *= ratio;
                    }
                    let cand = c.affine(&scale, &Rational::zero());
                    if best.as_ref().is_none_or(|cur| cand.lo() > cur.lo()) {
                        best = Some(cand);
                    }
                }
                best
            }
            Some(t @ Tail::Power { .. }) => t.power_last_below(b).map(|m| t.power_component(m)),
        };
        match (head, tail) {
            (Some(h), Some(t)) => Some(if t.lo() > h.lo() { t } else { h }),
            (h, t) => h.or(t),
        }
    }

    /// Among components with lower endpoint above `t`, one whose lower
    /// endpoint is smallest; head components win ties. Fails when such
    /// lower endpoints accumulate (a geometric tail with `t <= 0`).
    pub fn leftmost_lo_above(&self, t: &Rational) -> Result<Option<Interval>> {
        let head = self
            .head
            .components()
            .iter()
            .find(|c| c.lo().cmp_value(t) == Ordering::Greater)
            .cloned();
        let tail = match &self.tail {
            None => None,
            Some(Tail::Geometric { ratio, cell }) => {
                if !t.is_positive() {
                    return Err(Error::invalid(
                        "geometric components accumulate at 0; no leftmost one above a non-positive bound",
                    ));
                }
                let mut best: Option<Interval> = None;
                for c in cell.components() {
                    let lo = c.lo().finite().expect("bounded cell").clone();
                    if lo <= *t {
                        continue;
                    }
                    let mut scale = Rational::one();
                    while &lo * &scale * ratio > *t {
                        scale *= ratio;
                    }
                    let cand = c.affine(&scale, &Rational::zero());
                    if best.as_ref().is_none_or(|cur| cand.lo() < cur.lo()) {
                        best = Some(cand);
                    }
                }
                best
            }
            Some(tail @ Tail::Power { from, .. }) => {
                // the last component with lo < t; the next one or two start above t
                let mut m = tail.power_last_below(t).map_or(*from, |m| m + 1);
                while tail.power_component(m).lo().cmp_value(t) != Ordering::Greater {
                    m += 1;
                }
                Some(tail.power_component(m))
            }
        };
        Ok(match (head, tail) {
            (Some(h), Some(tl)) => Some(if tl.lo() < h.lo() { tl } else { h }),
            (h, tl) => h.or(tl),
        })
    }

    /// The unbounded-above component of the head, if any.
    pub fn top_ray(&self) -> Option<Interval> {
        self.head.components().last().filter(|c| *c.hi() == Endpoint::PosInf).cloned()
    }

    /// A finite snapshot: the head, plus tail components with index below
    /// `tail_count` (geometric: `m < tail_count`; power: `from <= m < from + tail_count`).
    pub fn snapshot(&self, tail_count: u64) -> OpenSet {
        let mut comps = self.head.components().to_vec();
        match &self.tail {
            None => {}
            Some(Tail::Geometric { ratio, cell }) => {
                let mut scale = Rational::one();
                for _ in 0..tail_count {
                    comps.extend(cell.components().iter().map(|c| c.affine(&scale, &Rational::zero())));
                    scale *= ratio;
                }
            }
            Some(t @ Tail::Power { from, .. }) => {
                comps.extend((*from..from + tail_count).map(|m| t.power_component(m)));
            }
        }
        OpenSet::from_intervals(comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, q};

    fn dyadic_gaps() -> PatternSet {
        // ⋃ (1/2^{m+1}, 1/2^m)
        let cell = OpenSet::normalize([(q(1, 2), int(1))]).unwrap();
        PatternSet::new(OpenSet::empty(), Some(Tail::Geometric { ratio: q(1, 2), cell })).unwrap()
    }

    fn squares(width: Rational) -> PatternSet {
        let tail = Tail::Power {
            coeff: int(1),
            exponent: 2,
            lo: int(0),
            hi: width,
            from: 0,
        };
        PatternSet::new(OpenSet::empty(), Some(tail)).unwrap()
    }

    #[test]
    fn geometric_membership() {
        let u = dyadic_gaps();
        assert!(u.clustered_at_zero());
        assert!(!u.unbounded_above());
        assert!(u.member(&q(3, 4)));
        assert!(u.member(&q(3, 1024)));
        assert!(!u.member(&q(1, 2)));
        assert!(!u.member(&q(1, 1024)));
        assert!(!u.member(&int(1)));
        assert!(!u.member(&int(0)));
        assert!(!u.member(&q(-1, 3)));
        assert_eq!(u.component_containing(&q(3, 16)), Some(Interval::finite(q(1, 8), q(1, 4)).unwrap()));
    }

    #[test]
    fn power_membership() {
        let u = squares(int(1));
        assert!(u.unbounded_above());
        assert!(u.member(&q(1, 2)));
        assert!(u.member(&(q(9, 1) + q(1, 2))));
        assert!(!u.member(&int(9)));
        assert!(!u.member(&int(10)));
        assert!(!u.member(&q(5, 1)));
        assert!(u.member(&(int(1_000_000) + q(1, 3))));
    }

    #[test]
    fn rejects_bad_tails() {
        let cell = OpenSet::normalize([(int(0), int(1))]).unwrap();
        assert!(PatternSet::new(OpenSet::empty(), Some(Tail::Geometric { ratio: q(1, 2), cell })).is_err());
        let cell = OpenSet::normalize([(q(1, 2), int(1))]).unwrap();
        assert!(PatternSet::new(OpenSet::empty(), Some(Tail::Geometric { ratio: int(1), cell })).is_err());
        let overlapping = Tail::Power {
            coeff: int(1),
            exponent: 1,
            lo: int(0),
            hi: int(2),
            from: 0,
        };
        assert!(PatternSet::new(OpenSet::empty(), Some(overlapping)).is_err());
    }

    #[test]
    fn extremal_component_queries() {
        let u = dyadic_gaps();
        assert_eq!(u.largest_lo_below(&q(3, 10)), Some(Interval::finite(q(1, 4), q(1, 2)).unwrap()));
        assert_eq!(
            u.leftmost_lo_above(&q(3, 10)).unwrap(),
            Some(Interval::finite(q(1, 2), int(1)).unwrap())
        );
        assert!(u.leftmost_lo_above(&int(0)).is_err());

        let sq = squares(q(1, 2));
        assert_eq!(
            sq.leftmost_lo_above(&int(4)).unwrap(),
            Some(Interval::finite(int(9), q(19, 2)).unwrap())
        );
        assert_eq!(
            sq.leftmost_lo_above(&q(39, 10)).unwrap(),
            Some(Interval::finite(int(4), q(9, 2)).unwrap())
        );
        assert_eq!(sq.largest_lo_below(&int(9)), Some(Interval::finite(int(4), q(9, 2)).unwrap()));
    }

    #[test]
    fn plain_open_set_json_is_accepted() {
        let u: PatternSet = serde_json::from_str(r#"{"components":[{"lo":"0/1","hi":"1/1"}]}"#).unwrap();
        assert!(u.clustered_at_zero());
        let p: PatternSet = serde_json::from_str(r#"{"tail":{"kind":"power","coeff":"1/1","exponent":2,"lo":"0/1","hi":"1/2"}}"#).unwrap();
        assert!(p.member(&q(65, 4)));
        let snap = p.snapshot(4);
        assert_eq!(snap.len(), 4);
    }
}
