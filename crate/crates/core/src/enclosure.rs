//! Rigorous rational enclosures of natural logarithms.
//!
//! The only non-exact quantity in the crate: `ln` of a positive rational is
//! bracketed by two dyadic rationals whose distance is below `2^-bits`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{ceil, floor, int, serde_str, Rational};

pub const DEFAULT_PRECISION_BITS: u32 = 64;

/// A closed interval `[lo, hi]` known to contain a real number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "serde_str")]
    pub lo: Rational,
    #[serde(with = "serde_str")]
    pub hi: Rational,
}

impl Enclosure {
    pub fn exact(x: Rational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn shift(&self, by: &Rational) -> Enclosure {
        Enclosure {
            lo: &self.lo + by,
            hi: &self.hi + by,
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// Widens outward onto the grid `2^-p`.
    fn round_out(&self, p: u32) -> Enclosure {
        let scale = Rational::from_integer(BigInt::one() << p);
        Enclosure {
            lo: Rational::from_integer(floor(&(&self.lo * &scale))) / &scale,
            hi: Rational::from_integer(ceil(&(&self.hi * &scale))) / &scale,
        }
    }
}

fn pow2_neg(p: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << p)
}

/// `atanh(z)` for `0 <= z <= 1/3`, to absolute error at most `2^-target`.
fn atanh_small(z: &Rational, target: u32) -> Enclosure {
    debug_assert!(!z.is_negative() && *z <= Rational::new(1.into(), 3.into()));
    if z.is_zero() {
        return Enclosure::exact(Rational::zero());
    }
    let tol = pow2_neg(target);
    let z2 = z * z;
    // remainder after the term z^(2k-1)/(2k-1) is at most z^(2k+1) / ((2k+1)(1 - z^2))
    let tail_factor = Rational::one() / (Rational::one() - &z2);
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut k: i64 = 0;
    loop {
        sum += &power / int(2 * k + 1);
        power *= &z2;
        k += 1;
        let remainder = &power * &tail_factor / int(2 * k + 1);
        if remainder <= tol {
            return Enclosure {
                lo: sum.clone(),
                hi: sum + remainder,
            };
        }
    }
}

/// Enclosure of `ln m` for a positive integer `m`, width below `2^-bits`.
fn ln_natural(m: &BigInt, bits: u32) -> Enclosure {
    if m.is_one() {
        return Enclosure::exact(Rational::zero());
    }
    // m = 2^k * y with y in [1, 2)
    let k = m.bits() - 1;
    let y = Rational::new(m.clone(), BigInt::one() << k);
    let guard = bits + 8 + (64 - k.leading_zeros());
    let z = (&y - Rational::one()) / (&y + Rational::one());
    let ln_y = atanh_small(&z, guard);
    let ln2 = atanh_small(&Rational::new(1.into(), 3.into()), guard);
    let two = int(2);
    let kq = Rational::from_integer(BigInt::from(k));
    Enclosure {
        lo: &two * (&kq * &ln2.lo + &ln_y.lo),
        hi: &two * (&kq * &ln2.hi + &ln_y.hi),
    }
    .round_out(bits + 4)
}

/// Enclosure of `ln x` for rational `x > 0`; width is below `2^-bits`.
pub fn ln_enclosure(x: &Rational, bits: u32) -> Result<Enclosure> {
    if !x.is_positive() {
        return Err(Error::invalid("logarithm of a non-positive number"));
    }
    let num = ln_natural(x.numer(), bits + 1);
    let den = ln_natural(x.denom(), bits + 1);
    Ok(num.sub(&den))
}
