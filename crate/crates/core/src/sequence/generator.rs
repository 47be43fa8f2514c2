use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::wave::WaveShape;
use super::DivergingSequence;
use crate::enclosure::{ln_enclosure, Enclosure, DEFAULT_PRECISION_BITS};
use crate::error::{Error, Result};
use crate::exact::rational::{floor, frac, from_u64, q, serde_str, to_index, Rational};
use crate::omega::OmegaFunction;

/// Serializable description of a built-in sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `n·step + offset`
    Arith {
        #[serde(with = "serde_str")]
        step: Rational,
        #[serde(with = "serde_str")]
        offset: Rational,
    },
    /// Blocks of `g(m) + 1` equally spaced points in `[m, m + 1)`.
    Theorem2 { g: OmegaFunction },
    /// `base(n) + r`
    Translate {
        base: Box<SequenceSpec>,
        #[serde(with = "serde_str")]
        r: Rational,
    },
    /// `x + ln(n + 1)`, approximated by enclosure midpoints.
    Log {
        #[serde(with = "serde_str")]
        x: Rational,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision_bits: Option<u32>,
    },
    /// `n + h(n·x)` for a periodic wave `h` (triangle by default).
    Wave {
        #[serde(with = "serde_str")]
        x: Rational,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<WaveShape>,
    },
    /// `n + frac(n·x)`
    Frac {
        #[serde(with = "serde_str")]
        x: Rational,
    },
}

/// Periods longer than this are not scanned for tail gap bounds.
const MAX_SCANNED_PERIOD: u64 = 1 << 20;

/// A runnable sequence built from a [`SequenceSpec`].
#[derive(Debug, Clone)]
pub struct Generator {
    spec: SequenceSpec,
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Arith {
        step: Rational,
        offset: Rational,
    },
    Theorem2(Arc<Theorem2Sequence>),
    Translate {
        base: Box<Generator>,
        r: Rational,
    },
    Log {
        x: Rational,
        bits: u32,
    },
    Periodic {
        x: Rational,
        shape: Option<WaveShape>,
        period: Option<u64>,
    },
}

pub fn make_generator(spec: &SequenceSpec) -> Result<Generator> {
    let inner = match spec {
        SequenceSpec::Arith { step, offset } => {
            if !step.is_positive() {
                return Err(Error::invalid("arithmetic step must be positive for divergence"));
            }
            Inner::Arith {
                step: step.clone(),
                offset: offset.clone(),
            }
        }
        SequenceSpec::Theorem2 { g } => Inner::Theorem2(Arc::new(theorem2_sequence(g.clone())?)),
        SequenceSpec::Translate { base, r } => Inner::Translate {
            base: Box::new(make_generator(base)?),
            r: r.clone(),
        },
        SequenceSpec::Log { x, precision_bits } => {
            let bits = precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
            if bits == 0 || bits > 4096 {
                return Err(Error::invalid("precision_bits must be in 1..=4096"));
            }
            Inner::Log { x: x.clone(), bits }
        }
        SequenceSpec::Wave { x, shape } => {
            let shape = shape.clone().unwrap_or_default();
            let ratio = x / shape.period();
            Inner::Periodic {
                x: x.clone(),
                period: ratio.denom().to_u64(),
                shape: Some(shape),
            }
        }
        SequenceSpec::Frac { x } => Inner::Periodic {
            x: x.clone(),
            period: x.denom().to_u64(),
            shape: None,
        },
    };
    Ok(Generator { spec: spec.clone(), inner })
}

impl Generator {
    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    /// Exact enclosure of a term. Point-valued except for the log family.
    pub fn term_enclosure(&self, n: u64) -> Result<Enclosure> {
        match &self.inner {
            Inner::Log { x, bits } => Ok(ln_enclosure(&from_u64(n + 1), *bits)?.shift(x)),
            Inner::Translate { base, r } => Ok(base.term_enclosure(n)?.shift(r)),
            _ => Ok(Enclosure::exact(self.term(n)?)),
        }
    }

    fn periodic_gaps_max(&self, from: u64, period: Option<u64>) -> Result<Rational> {
        let p = period
            .filter(|&p| p <= MAX_SCANNED_PERIOD)
            .ok_or_else(|| Error::capability("tail_gap_bound", "gap period too long to scan"))?;
        let terms = self.terms_range(from, from + p + 1)?;
        Ok(terms.windows(2).map(|w| &w[1] - &w[0]).max().expect("period is at least 1"))
    }
}

fn clamp_index(x: BigInt) -> Result<u64> {
    to_index(&x)
}

impl DivergingSequence for Generator {
    fn term(&self, n: u64) -> Result<Rational> {
        Ok(match &self.inner {
            Inner::Arith { step, offset } => from_u64(n) * step + offset,
            Inner::Theorem2(t) => t.term(n)?,
            Inner::Translate { base, r } => base.term(n)? + r,
            Inner::Log { .. } => self.term_enclosure(n)?.midpoint(),
            Inner::Periodic { x, shape, .. } => {
                let y = from_u64(n) * x;
                let h = match shape {
                    Some(w) => w.eval(&y),
                    None => frac(&y),
                };
                from_u64(n) + h
            }
        })
    }

    fn divergence_modulus(&self, bound: &Rational) -> Result<u64> {
        match &self.inner {
            Inner::Arith { step, offset } => clamp_index(floor(&((bound - offset) / step)) + 2),
            Inner::Theorem2(t) => t.divergence_modulus(bound),
            Inner::Translate { base, r } => base.divergence_modulus(&(bound - r)),
            Inner::Log { x, .. } => {
                // ln(3^k + 2) > k·ln 3 > k >= bound - x, with a margin far above the enclosure width
                let y = bound - x;
                if y.is_negative() {
                    return Ok(0);
                }
                let k = crate::exact::rational::ceil(&y);
                let k = k
                    .to_u32()
                    .filter(|&k| k <= 40)
                    .ok_or_else(|| Error::Overflow("log-family modulus beyond 64-bit indices".into()))?;
                Ok(3u64.pow(k) + 1)
            }
            Inner::Periodic { .. } => clamp_index(floor(bound) + 1),
        }
    }

    fn entry_index(&self, lo: &Rational) -> Result<u64> {
        match &self.inner {
            Inner::Arith { step, offset } => clamp_index(floor(&((lo - offset) / step)) + 1),
            Inner::Theorem2(t) => t.entry_index(lo),
            Inner::Translate { base, r } => base.entry_index(&(lo - r)),
            Inner::Log { x, .. } => {
                // n + 1 <= 2^k with k = floor(lo - x) gives ln(n + 1) <= k·ln 2 < lo - x
                let y = lo - x;
                if y.is_negative() {
                    return Ok(0);
                }
                Ok(floor(&y).to_u32().filter(|&k| k < 64).map_or(u64::MAX, |k| 1u64 << k))
            }
            Inner::Periodic { .. } => clamp_index(floor(lo)),
        }
    }

    fn gap_modulus(&self, eps: &Rational) -> Result<u64> {
        if !eps.is_positive() {
            return Err(Error::invalid("gap modulus needs a positive epsilon"));
        }
        match &self.inner {
            Inner::Arith { step, .. } if step < eps => Ok(0),
            Inner::Arith { step, .. } => Err(Error::capability(
                "gap_modulus",
                format!(
                    "constant gaps {} never fall below {}",
                    crate::exact::format_rational(step),
                    crate::exact::format_rational(eps)
                ),
            )),
            Inner::Theorem2(t) => t.gap_modulus(eps),
            Inner::Translate { base, .. } => base.gap_modulus(eps),
            // ln((n+2)/(n+1)) < 1/(n+1) < eps once n >= floor(1/eps)
            Inner::Log { .. } => clamp_index(floor(&(Rational::from_integer(1.into()) / eps))),
            Inner::Periodic { period, .. } => {
                let max = self.periodic_gaps_max(0, *period)?;
                if &max < eps {
                    Ok(0)
                } else {
                    Err(Error::capability("gap_modulus", "periodic gaps do not tend to zero"))
                }
            }
        }
    }

    fn tail_gap_bound(&self, from: u64) -> Result<Rational> {
        match &self.inner {
            Inner::Arith { step, .. } => Ok(step.clone()),
            Inner::Theorem2(t) => t.tail_gap_bound(from),
            Inner::Translate { base, .. } => base.tail_gap_bound(from),
            // gaps ln((n+2)/(n+1)) decrease, so the first one is the maximum
            Inner::Log { bits, .. } => {
                let e = ln_enclosure(&Rational::new(BigInt::from(from) + 2, BigInt::from(from) + 1), *bits)?;
                Ok(e.midpoint())
            }
            Inner::Periodic { period, .. } => self.periodic_gaps_max(from, *period),
        }
    }

    fn is_monotone(&self) -> bool {
        match &self.inner {
            Inner::Translate { base, .. } => base.is_monotone(),
            // n + h(n·x) stays within [n, n + 1]
            _ => true,
        }
    }

    fn is_approximate(&self) -> bool {
        match &self.inner {
            Inner::Log { .. } => true,
            Inner::Translate { base, .. } => base.is_approximate(),
            _ => false,
        }
    }

    fn terms_range(&self, start: u64, end: u64) -> Result<Vec<Rational>> {
        match &self.inner {
            Inner::Theorem2(t) => t.terms_range(start, end),
            Inner::Translate { base, r } => Ok(base.terms_range(start, end)?.into_iter().map(|t| t + r).collect()),
            _ => (start..end).map(|n| self.term(n)).collect(),
        }
    }
}

/// Block tables cover indices below this; the closed form handles the rest.
const TABLE_LIMIT: u64 = 1 << 20;

/// The block sequence assigned to a non-decreasing `g`: block `m` holds
/// `m, m + 1/(g(m)+1), ..., m + g(m)/(g(m)+1)`.
#[derive(Debug)]
pub struct Theorem2Sequence {
    g: OmegaFunction,
    /// Past `TABLE_LIMIT`, block starts come from a closed-form prefix sum
    /// of a monotone `g` instead of the table.
    closed_form: bool,
    blocks: Mutex<Blocks>,
}

#[derive(Debug, Default)]
struct Blocks {
    /// `starts[m] = L(m)`; always one longer than `values`.
    starts: Vec<u64>,
    /// `values[m] = g(m)`
    values: Vec<u64>,
}

impl Blocks {
    fn extend(&mut self, g: &OmegaFunction) -> Result<()> {
        let m = self.values.len() as u64;
        let gm = g.eval_u64(m)?;
        if let Some(&prev) = self.values.last() {
            if gm < prev {
                return Err(Error::NotNonDecreasing { index: m });
            }
        }
        let start = *self.starts.last().expect("starts seeded with 0");
        let next = start
            .checked_add(gm)
            .and_then(|v| v.checked_add(1))
            .ok_or_else(|| Error::Overflow(format!("block start beyond 64 bits at block {m}")))?;
        self.values.push(gm);
        self.starts.push(next);
        Ok(())
    }
}

pub fn theorem2_sequence(g: OmegaFunction) -> Result<Theorem2Sequence> {
    if let OmegaFunction::Prefix { values } = &g {
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NotNonDecreasing { index: i as u64 + 1 });
        }
    }
    let closed_form = g.known_non_decreasing() && g.prefix_sum(1).is_some();
    Ok(Theorem2Sequence {
        g,
        closed_form,
        blocks: Mutex::new(Blocks {
            starts: vec![0],
            values: Vec::new(),
        }),
    })
}

impl Theorem2Sequence {
    pub fn g(&self) -> &OmegaFunction {
        &self.g
    }

    fn with_blocks<T>(&self, f: impl FnOnce(&mut Blocks) -> Result<T>) -> Result<T> {
        let mut b = self.blocks.lock().expect("block table lock poisoned");
        f(&mut b)
    }

    fn closed_start(&self, m: u64) -> Result<u64> {
        let sum = self.g.prefix_sum(m).expect("closed form checked at construction") + BigUint::from(m);
        sum.to_u64()
            .ok_or_else(|| Error::Overflow(format!("block start beyond 64 bits at block {m}")))
    }

    /// `L(m)`, the index where block `m` starts.
    pub fn block_start(&self, m: u64) -> Result<u64> {
        if self.closed_form && m >= TABLE_LIMIT {
            return self.closed_start(m);
        }
        self.with_blocks(|b| {
            while (b.values.len() as u64) < m {
                b.extend(&self.g)?;
            }
            Ok(b.starts[m as usize])
        })
    }

    /// `(m, L(m), g(m))` for the block containing index `n`.
    pub fn block_of(&self, n: u64) -> Result<(u64, u64, u64)> {
        if self.closed_form && n >= TABLE_LIMIT {
            // least m with L(m + 1) > n; L(m) >= m bounds the search by n
            let (mut lo, mut hi) = (0u64, n);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let next = self.closed_start(mid + 1);
                if next.as_ref().map_or(true, |&l| l > n) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            return Ok((lo, self.closed_start(lo)?, self.g.eval_u64(lo)?));
        }
        self.with_blocks(|b| {
            while *b.starts.last().expect("seeded") <= n {
                b.extend(&self.g)?;
            }
            let m = b.starts.partition_point(|&s| s <= n) - 1;
            Ok((m as u64, b.starts[m], b.values[m]))
        })
    }

    fn block_index_bound(bound: &Rational, extra: i64) -> Result<u64> {
        to_index(&(floor(bound) + extra))
    }
}

/// `m + k/(g + 1)`, reduced in machine integers.
fn block_term(m: u64, k: u64, g: u64) -> Rational {
    let d = u128::from(g) + 1;
    let num = u128::from(m) * d + u128::from(k);
    let c = num.gcd(&d);
    Rational::new_raw(BigInt::from(num / c), BigInt::from(d / c))
}

impl DivergingSequence for Theorem2Sequence {
    fn term(&self, n: u64) -> Result<Rational> {
        let (m, start, gm) = self.block_of(n)?;
        Ok(block_term(m, n - start, gm))
    }

    fn divergence_modulus(&self, bound: &Rational) -> Result<u64> {
        self.block_start(Self::block_index_bound(bound, 2)?)
    }

    fn entry_index(&self, lo: &Rational) -> Result<u64> {
        // every term of block m lies in [m, m + 1)
        self.block_start(Self::block_index_bound(lo, 0)?)
    }

    fn gap_modulus(&self, eps: &Rational) -> Result<u64> {
        if !eps.is_positive() {
            return Err(Error::invalid("gap modulus needs a positive epsilon"));
        }
        // gaps in block m are 1/(g(m)+1) < eps  iff  g(m) >= floor(1/eps)
        let need = floor(&(q(1, 1) / eps)).to_biguint().unwrap_or_else(BigUint::zero);
        match self.g.first_reaching(&need) {
            Some(m) => self.block_start(m),
            None => Err(Error::capability(
                "gap_modulus",
                format!("g is bounded, so gaps never fall below {}", crate::exact::format_rational(eps)),
            )),
        }
    }

    fn is_monotone(&self) -> bool {
        true
    }

    fn tail_gap_bound(&self, from: u64) -> Result<Rational> {
        // gaps are non-increasing, so the one at `from` is the largest
        let (_, _, gm) = self.block_of(from)?;
        Ok(Rational::new(1.into(), BigInt::from(gm) + 1))
    }

    fn terms_range(&self, start: u64, end: u64) -> Result<Vec<Rational>> {
        if start >= end {
            return Ok(Vec::new());
        }
        let (mut m, mut block_start, mut gm) = self.block_of(start)?;
        let mut out = Vec::with_capacity((end - start).min(1 << 20) as usize);
        let mut n = start;
        while n < end {
            if n > block_start + gm {
                (m, block_start, gm) = self.block_of(n)?;
            }
            out.push(block_term(m, n - block_start, gm));
            n += 1;
        }
        Ok(out)
    }
}
