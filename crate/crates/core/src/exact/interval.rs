use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{format_rational, midpoint, parse_rational, Rational};
use crate::error::{Error, Result};

/// An interval endpoint. The derived order puts `NegInf` below every finite
/// value and `PosInf` above.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Endpoint::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Endpoint::Finite(_))
    }

    fn map_affine(&self, scale: &Rational, shift: &Rational) -> Endpoint {
        let positive = *scale > Rational::from_integer(0.into());
        match self {
            Endpoint::Finite(x) => Endpoint::Finite(x * scale + shift),
            Endpoint::NegInf if positive => Endpoint::NegInf,
            Endpoint::NegInf => Endpoint::PosInf,
            Endpoint::PosInf if positive => Endpoint::PosInf,
            Endpoint::PosInf => Endpoint::NegInf,
        }
    }

    /// Compares against a finite value.
    pub fn cmp_value(&self, x: &Rational) -> Ordering {
        match self {
            Endpoint::NegInf => Ordering::Less,
            Endpoint::PosInf => Ordering::Greater,
            Endpoint::Finite(v) => v.cmp(x),
        }
    }
}

impl From<Rational> for Endpoint {
    fn from(x: Rational) -> Self {
        Endpoint::Finite(x)
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::PosInf => f.write_str("+inf"),
            Endpoint::Finite(x) => f.write_str(&format_rational(x)),
        }
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "-inf" => Ok(Endpoint::NegInf),
            "+inf" | "inf" => Ok(Endpoint::PosInf),
            _ => parse_rational(&s).map(Endpoint::Finite).map_err(serde::de::Error::custom),
        }
    }
}

/// An open interval `(lo, hi)` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    lo: Endpoint,
    hi: Endpoint,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Endpoint,
    hi: Endpoint,
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInterval::deserialize(d)?;
        Interval::new(raw.lo, raw.hi).map_err(serde::de::Error::custom)
    }
}

impl Interval {
    pub fn new(lo: impl Into<Endpoint>, hi: impl Into<Endpoint>) -> Result<Self> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo >= hi || lo == Endpoint::PosInf || hi == Endpoint::NegInf {
            return Err(Error::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Bounded interval from two rationals.
    pub fn finite(lo: Rational, hi: Rational) -> Result<Self> {
        Interval::new(Endpoint::Finite(lo), Endpoint::Finite(hi))
    }

    pub fn lo(&self) -> &Endpoint {
        &self.lo
    }

    pub fn hi(&self) -> &Endpoint {
        &self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo.cmp_value(x) == Ordering::Less && self.hi.cmp_value(x) == Ordering::Greater
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Both endpoints, when finite.
    pub fn bounds(&self) -> Option<(&Rational, &Rational)> {
        Some((self.lo.finite()?, self.hi.finite()?))
    }

    pub fn length(&self) -> Option<Rational> {
        self.bounds().map(|(a, b)| b - a)
    }

    pub fn midpoint(&self) -> Option<Rational> {
        self.bounds().map(|(a, b)| midpoint(a, b))
    }

    /// Intersection of two open intervals, if nonempty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        Interval::new(lo, hi).ok()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub(crate) fn affine(&self, scale: &Rational, shift: &Rational) -> Interval {
        let a = self.lo.map_affine(scale, shift);
        let b = self.hi.map_affine(scale, shift);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Interval { lo, hi }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A closed bounded interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClosedInterval {
    #[serde(with = "super::rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "super::rational::serde_str")]
    pub hi: Rational,
}

impl ClosedInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInterval {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(ClosedInterval { lo, hi })
    }

    /// The closed middle half `[lo + w/4, hi - w/4]` of an open bounded interval.
    pub fn middle_half(open: &Interval) -> Option<Self> {
        let (a, b) = open.bounds()?;
        let quarter = (b - a) / Rational::from_integer(4.into());
        Some(ClosedInterval {
            lo: a + &quarter,
            hi: b - quarter,
        })
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn interior(&self) -> Interval {
        Interval {
            lo: Endpoint::Finite(self.lo.clone()),
            hi: Endpoint::Finite(self.hi.clone()),
        }
    }

    /// `[lo, hi]` lies strictly inside the open interval.
    pub fn is_inside(&self, open: &Interval) -> bool {
        open.contains(&self.lo) && open.contains(&self.hi)
    }

    pub fn is_subset_of(&self, other: &ClosedInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Display for ClosedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", format_rational(&self.lo), format_rational(&self.hi))
    }
}
