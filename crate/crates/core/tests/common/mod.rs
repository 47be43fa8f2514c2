//! Naive reference implementations and seeded input builders shared by
//! the property tests and the acceptance runner.
#![allow(dead_code)]

use std::cmp::Ordering;

use divseq::exact::q;
use divseq::omega::Formula;
use divseq::{Endpoint, OmegaFunction, OpenSet, PatternSet, Rational, SequenceSpec, Tail};
use num_bigint::BigUint;
use rand::Rng;

/// An unnormalized list of open intervals; membership is "in any of them".
#[derive(Debug, Clone)]
pub struct NaiveSet(pub Vec<(Endpoint, Endpoint)>);

impl NaiveSet {
    pub fn member(&self, x: &Rational) -> bool {
        self.0
            .iter()
            .any(|(lo, hi)| lo.cmp_value(x) == Ordering::Less && hi.cmp_value(x) == Ordering::Greater)
    }

    pub fn affine(&self, k: &Rational, c: &Rational) -> NaiveSet {
        let map = |e: &Endpoint| match e {
            Endpoint::Finite(v) => Endpoint::Finite(v * k + c),
            Endpoint::NegInf if *k > Rational::from_integer(0.into()) => Endpoint::NegInf,
            Endpoint::NegInf => Endpoint::PosInf,
            Endpoint::PosInf if *k > Rational::from_integer(0.into()) => Endpoint::PosInf,
            Endpoint::PosInf => Endpoint::NegInf,
        };
        NaiveSet(
            self.0
                .iter()
                .map(|(lo, hi)| {
                    let (a, b) = (map(lo), map(hi));
                    if a < b {
                        (a, b)
                    } else {
                        (b, a)
                    }
                })
                .collect(),
        )
    }

    pub fn finite_endpoints(&self) -> Vec<Rational> {
        self.0
            .iter()
            .flat_map(|(a, b)| [a.finite().cloned(), b.finite().cloned()])
            .flatten()
            .collect()
    }
}

/// Points where a union of open intervals can change membership, plus one
/// point in every gap between them; comparing membership there decides
/// equality of two such unions exactly.
pub fn probe_points(mut pts: Vec<Rational>) -> Vec<Rational> {
    pts.sort();
    pts.dedup();
    let one = Rational::from_integer(1.into());
    let mut out = Vec::new();
    match (pts.first(), pts.last()) {
        (Some(a), Some(b)) => {
            out.push(a - &one);
            out.push(b + &one);
        }
        _ => out.push(Rational::from_integer(0.into())),
    }
    for w in pts.windows(2) {
        out.push((&w[0] + &w[1]) / Rational::from_integer(2.into()));
    }
    out.extend(pts);
    out
}

pub fn open_set_endpoints(s: &OpenSet) -> Vec<Rational> {
    s.components()
        .iter()
        .flat_map(|c| [c.lo().finite().cloned(), c.hi().finite().cloned()])
        .flatten()
        .collect()
}

/// Same point set, decided on the joint probe points.
pub fn same_set(a: &OpenSet, b: &NaiveSet) -> bool {
    let mut pts = open_set_endpoints(a);
    pts.extend(b.finite_endpoints());
    probe_points(pts).iter().all(|x| a.member(x) == b.member(x))
}

/// Normal form: sorted, pairwise disjoint, and no two components overlapping.
pub fn is_normal(s: &OpenSet) -> bool {
    s.components().windows(2).all(|w| w[0].hi() <= w[1].lo())
}

pub fn rational<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = rng.gen_range(lo * d..=hi * d);
    q(n, d)
}

pub fn naive_set<R: Rng>(rng: &mut R, count: usize) -> NaiveSet {
    let mut raw = Vec::new();
    for _ in 0..count {
        let a = rational(rng, -10, 10, 6);
        let b = &a + rational(rng, 0, 4, 6) + q(1, 7);
        let lo = if rng.gen_ratio(1, 12) {
            Endpoint::NegInf
        } else {
            Endpoint::Finite(a)
        };
        let hi = if rng.gen_ratio(1, 12) {
            Endpoint::PosInf
        } else {
            Endpoint::Finite(b)
        };
        raw.push((lo, hi));
    }
    NaiveSet(raw)
}

pub fn formula<R: Rng>(rng: &mut R) -> OmegaFunction {
    let f = match rng.gen_range(0..6) {
        0 | 1 => Formula::Linear {
            a: rational(rng, 0, 6, 4),
            b: rational(rng, 0, 20, 3),
        },
        2 => Formula::Poly {
            coeffs: (0..rng.gen_range(1..=4)).map(|_| rational(rng, 0, 5, 3)).collect(),
        },
        3 => Formula::Square,
        4 => Formula::Pow2,
        _ => Formula::Factorial,
    };
    OmegaFunction::Formula(f)
}

fn nondecreasing_g<R: Rng>(rng: &mut R) -> OmegaFunction {
    match rng.gen_range(0..3) {
        0 => OmegaFunction::linear(rng.gen_range(0..=2), rng.gen_range(0..=3)),
        1 => OmegaFunction::constant(rng.gen_range(0..=5)),
        _ => {
            let mut v = rng.gen_range(0..3u64);
            let values = (0..rng.gen_range(1..12))
                .map(|_| {
                    v += rng.gen_range(0..3);
                    BigUint::from(v)
                })
                .collect();
            OmegaFunction::prefix(values).expect("nonempty")
        }
    }
}

/// A random arithmetic, block, or translated `SequenceSpec`.
pub fn member_spec<R: Rng>(rng: &mut R) -> SequenceSpec {
    let base = |rng: &mut R| -> SequenceSpec {
        if rng.gen_bool(0.5) {
            let d = rng.gen_range(1..=8);
            SequenceSpec::Arith {
                step: q(rng.gen_range(1..=2 * d), d),
                offset: rational(rng, -2, 2, 8),
            }
        } else {
            SequenceSpec::Theorem2 { g: nondecreasing_g(rng) }
        }
    };
    if rng.gen_ratio(1, 3) {
        SequenceSpec::Translate {
            base: Box::new(base(rng)),
            r: rational(rng, -3, 3, 9),
        }
    } else {
        base(rng)
    }
}

/// At least 40 explicit components shrinking toward 0, followed below by a
/// geometric tail.
pub fn clustered_set<R: Rng>(rng: &mut R) -> PatternSet {
    let mut comps = Vec::new();
    let count = rng.gen_range(40..=56);
    let mut scale = q(1, 1);
    for _ in 0..count {
        // a component inside (scale/2, scale)
        let u = q(rng.gen_range(0..8), 16);
        let w = q(rng.gen_range(1..=7), 16);
        let half = &scale * q(1, 2);
        let lo = &half + &u * &half;
        let hi = &lo + &w * &half;
        comps.push((lo, hi.min(scale.clone())));
        scale = half;
    }
    let head = OpenSet::normalize(comps).expect("valid components");
    let a = q(rng.gen_range(1..=4), 8);
    let cell = OpenSet::normalize([(&scale * &a, &scale * (&a + q(rng.gen_range(1..=3), 8)))]).expect("valid cell");
    let ratio = q(rng.gen_range(1..=3), 4);
    PatternSet::new(head, Some(Tail::Geometric { ratio, cell })).expect("valid tail")
}

/// Random bounded head plus a polynomial tail of disjoint components.
pub fn unbounded_set<R: Rng>(rng: &mut R) -> PatternSet {
    let exponent = rng.gen_range(1..=3u32);
    let coeff = q(rng.gen_range(1..=6), 2);
    let from = rng.gen_range(1..=4u64);
    // first gap between bases is coeff·((from+1)^e - from^e) >= coeff
    let width = &coeff * q(rng.gen_range(1..=7), 8);
    let lo = rational(rng, -2, 2, 4);
    let hi = &lo + width;
    let tail = Tail::Power {
        coeff,
        exponent,
        lo,
        hi,
        from,
    };
    let head: Vec<_> = (0..rng.gen_range(0..4))
        .map(|_| {
            let a = rational(rng, -20, 20, 4);
            let b = &a + q(rng.gen_range(1..=8), 4);
            (a, b)
        })
        .collect();
    PatternSet::new(OpenSet::normalize(head).expect("valid head"), Some(tail)).expect("valid tail")
}

/// Values at `0..horizon`, computed straight from the formula's definition.
pub fn naive_table(f: &Formula, horizon: u64) -> Vec<BigUint> {
    use num_integer::Integer;
    use num_traits::{One, ToPrimitive, Zero};
    let floor_nat = |x: &Rational| -> BigUint {
        let (fl, _) = x.numer().div_mod_floor(x.denom());
        fl.to_biguint().unwrap_or_default()
    };
    let mut fact = BigUint::one();
    (0..horizon)
        .map(|n| match f {
            Formula::Linear { a, b } => floor_nat(&(a * Rational::from_integer(n.into()) + b)),
            Formula::Poly { coeffs } => {
                let x = Rational::from_integer(n.into());
                let mut sum = Rational::zero();
                for (k, c) in coeffs.iter().enumerate() {
                    sum += c * num_traits::pow(x.clone(), k);
                }
                floor_nat(&sum)
            }
            Formula::Square => BigUint::from(n).pow(2),
            Formula::Pow2 => BigUint::from(2u32).pow(n.to_u32().expect("small horizon")),
            Formula::Factorial => {
                if n > 0 {
                    fact *= BigUint::from(n);
                }
                fact.clone()
            }
        })
        .collect()
}
