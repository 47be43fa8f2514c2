//! Functions `ω → ω`, eventual domination verdicts, the diagonal dominator
//! of a countable family and the running-max envelope.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{floor, format_rational, from_biguint, from_u64, parse_rational, serde_nat, Rational};

/// A total function on the naturals with natural values.
///
/// Prefix presentations extend as the constant equal to their last value;
/// that rule is part of the serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawOmega")]
pub enum OmegaFunction {
    Prefix {
        #[serde(with = "serde_nat::vec")]
        values: Vec<BigUint>,
    },
    Formula(Formula),
    /// `g(n) = max{f_j(n) : j <= min(n, len - 1)} + 1`.
    Dominator {
        members: Vec<OmegaFunction>,
    },
    /// `n ↦ max{f(0), ..., f(n)}`.
    Envelope {
        of: Box<OmegaFunction>,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawOmega {
    Prefix {
        #[serde(with = "serde_nat::vec")]
        values: Vec<BigUint>,
    },
    Formula(Formula),
    Dominator {
        members: Vec<OmegaFunction>,
    },
    Envelope {
        of: Box<OmegaFunction>,
    },
}

impl TryFrom<RawOmega> for OmegaFunction {
    type Error = Error;

    fn try_from(raw: RawOmega) -> Result<Self> {
        match raw {
            RawOmega::Prefix { values } => OmegaFunction::prefix(values),
            RawOmega::Formula(f) => Ok(OmegaFunction::Formula(f)),
            RawOmega::Dominator { members } => diagonal_dominator(&members),
            RawOmega::Envelope { of } => Ok(monotone_envelope(&of)),
        }
    }
}

/// Named closed-form functions with non-negative rational parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFormula", into = "RawFormula")]
pub enum Formula {
    /// `⌊a·n + b⌋`
    Linear {
        a: Rational,
        b: Rational,
    },
    /// `⌊Σ c_k n^k⌋`
    Poly {
        coeffs: Vec<Rational>,
    },
    Square,
    Pow2,
    Factorial,
}

#[derive(Serialize, Deserialize)]
struct RawFormula {
    name: String,
    #[serde(default)]
    params: BTreeMap<String, String>,
}

impl TryFrom<RawFormula> for Formula {
    type Error = Error;

    fn try_from(raw: RawFormula) -> Result<Self> {
        let param = |key: &str| -> Result<Rational> {
            let text = raw
                .params
                .get(key)
                .ok_or_else(|| Error::invalid(format!("formula `{}` needs parameter `{key}`", raw.name)))?;
            let v = parse_rational(text)?;
            if v.is_negative() {
                return Err(Error::invalid(format!("parameter `{key}` must be non-negative")));
            }
            Ok(v)
        };
        let formula = match raw.name.as_str() {
            "linear" => Formula::Linear {
                a: param("a")?,
                b: param("b")?,
            },
            "poly" => {
                let mut coeffs = Vec::new();
                while raw.params.contains_key(&format!("c{}", coeffs.len())) {
                    coeffs.push(param(&format!("c{}", coeffs.len()))?);
                }
                if coeffs.len() != raw.params.len() || coeffs.is_empty() {
                    return Err(Error::invalid("poly parameters must be c0, c1, ... without gaps"));
                }
                Formula::Poly { coeffs }
            }
            "square" => Formula::Square,
            "pow2" => Formula::Pow2,
            "factorial" => Formula::Factorial,
            other => return Err(Error::invalid(format!("unknown formula `{other}`"))),
        };
        if !matches!(formula, Formula::Linear { .. } | Formula::Poly { .. }) && !raw.params.is_empty() {
            return Err(Error::invalid(format!("formula `{}` takes no parameters", raw.name)));
        }
        Ok(formula)
    }
}

impl From<Formula> for RawFormula {
    fn from(f: Formula) -> Self {
        let mut params = BTreeMap::new();
        let name = match f {
            Formula::Linear { a, b } => {
                params.insert("a".into(), format_rational(&a));
                params.insert("b".into(), format_rational(&b));
                "linear"
            }
            Formula::Poly { coeffs } => {
                for (k, c) in coeffs.iter().enumerate() {
                    params.insert(format!("c{k}"), format_rational(c));
                }
                "poly"
            }
            Formula::Square => "square",
            Formula::Pow2 => "pow2",
            Formula::Factorial => "factorial",
        };
        RawFormula {
            name: name.to_string(),
            params,
        }
    }
}

fn floor_nat(x: &Rational) -> BigUint {
    floor(x).to_biguint().unwrap_or_default()
}

impl Formula {
    fn eval(&self, n: u64) -> BigUint {
        match self {
            Formula::Linear { a, b } => floor_nat(&(a * from_u64(n) + b)),
            Formula::Poly { coeffs } => {
                let x = from_u64(n);
                // Horner
                let v = coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * &x + c);
                floor_nat(&v)
            }
            Formula::Square => BigUint::from(n) * BigUint::from(n),
            Formula::Pow2 => BigUint::one() << n,
            Formula::Factorial => (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k)),
        }
    }

    fn tabulate(&self, horizon: u64) -> Vec<BigUint> {
        match self {
            Formula::Factorial => {
                let mut acc = BigUint::one();
                (0..horizon)
                    .map(|n| {
                        if n > 0 {
                            acc *= BigUint::from(n);
                        }
                        acc.clone()
                    })
                    .collect()
            }
            _ => (0..horizon).map(|n| self.eval(n)).collect(),
        }
    }

    fn is_unbounded(&self) -> bool {
        match self {
            Formula::Linear { a, .. } => !a.is_zero(),
            Formula::Poly { coeffs } => coeffs.iter().skip(1).any(|c| !c.is_zero()),
            _ => true,
        }
    }
}

impl OmegaFunction {
    pub fn prefix(values: Vec<BigUint>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("prefix presentation needs at least one value"));
        }
        Ok(OmegaFunction::Prefix { values })
    }

    pub fn from_u64s(values: &[u64]) -> Result<Self> {
        OmegaFunction::prefix(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn constant(c: u64) -> Self {
        OmegaFunction::Prefix {
            values: vec![BigUint::from(c)],
        }
    }

    /// `⌊a·n + b⌋` with integer coefficients.
    pub fn linear(a: u64, b: u64) -> Self {
        OmegaFunction::Formula(Formula::Linear {
            a: from_u64(a),
            b: from_u64(b),
        })
    }

    pub fn eval(&self, n: u64) -> BigUint {
        match self {
            OmegaFunction::Prefix { values } => {
                let i = usize::try_from(n).unwrap_or(usize::MAX).min(values.len() - 1);
                values[i].clone()
            }
            OmegaFunction::Formula(f) => f.eval(n),
            OmegaFunction::Dominator { members } => {
                let top = n.min(members.len() as u64 - 1) as usize;
                members[..=top].iter().map(|f| f.eval(n)).max().expect("dominator has members") + BigUint::one()
            }
            OmegaFunction::Envelope { of } => (0..=n).map(|k| of.eval(k)).max().expect("nonempty range"),
        }
    }

    /// Values at `0..horizon`.
    pub fn tabulate(&self, horizon: u64) -> Vec<BigUint> {
        match self {
            // running max in one pass instead of quadratic re-evaluation
            OmegaFunction::Envelope { of } => {
                let mut acc = BigUint::zero();
                (0..horizon)
                    .map(|k| {
                        let v = of.eval(k);
                        if k == 0 || v > acc {
                            acc = v;
                        }
                        acc.clone()
                    })
                    .collect()
            }
            OmegaFunction::Formula(f) => f.tabulate(horizon),
            OmegaFunction::Dominator { members } => {
                let rows: Vec<Vec<BigUint>> = members.iter().map(|f| f.tabulate(horizon)).collect();
                (0..horizon as usize)
                    .map(|n| {
                        let top = n.min(rows.len() - 1);
                        rows[..=top].iter().map(|r| &r[n]).max().expect("dominator has members") + BigUint::one()
                    })
                    .collect()
            }
            OmegaFunction::Prefix { .. } => (0..horizon).map(|n| self.eval(n)).collect(),
        }
    }

    /// `u64` value, or an overflow error.
    pub fn eval_u64(&self, n: u64) -> Result<u64> {
        let v = self.eval(n);
        v.to_u64()
            .ok_or_else(|| Error::Overflow(format!("function value {v} at index {n} exceeds 64 bits")))
    }

    /// Whether the values grow without bound. Decidable for every
    /// presentation this type admits.
    pub fn is_unbounded(&self) -> bool {
        match self {
            OmegaFunction::Prefix { .. } => false,
            OmegaFunction::Formula(f) => f.is_unbounded(),
            OmegaFunction::Dominator { members } => members.iter().any(OmegaFunction::is_unbounded),
            OmegaFunction::Envelope { of } => of.is_unbounded(),
        }
    }

    /// For bounded functions, an index after which the value is constant.
    pub fn stabilization_index(&self) -> Option<u64> {
        match self {
            OmegaFunction::Prefix { values } => Some(values.len() as u64 - 1),
            OmegaFunction::Formula(f) => (!f.is_unbounded()).then_some(0),
            OmegaFunction::Dominator { members } => {
                let mut idx = members.len() as u64 - 1;
                for m in members {
                    idx = idx.max(m.stabilization_index()?);
                }
                Some(idx)
            }
            OmegaFunction::Envelope { of } => of.stabilization_index(),
        }
    }

    /// Whether the presentation is non-decreasing by construction, without
    /// evaluating anything. `false` means "not known", not "decreasing".
    pub fn known_non_decreasing(&self) -> bool {
        match self {
            OmegaFunction::Prefix { values } => values.windows(2).all(|w| w[0] <= w[1]),
            OmegaFunction::Formula(_) => true,
            OmegaFunction::Envelope { .. } => true,
            OmegaFunction::Dominator { members } => members.len() == 1 && members[0].known_non_decreasing(),
        }
    }

    /// Least `m` with `f(m) >= bound`, if any.
    pub fn first_reaching(&self, bound: &BigUint) -> Option<u64> {
        let limit = self.stabilization_index();
        if self.known_non_decreasing() {
            // gallop to a reaching index, then bisect
            let mut hi = match limit {
                Some(s) if &self.eval(s) < bound => return None,
                Some(s) => s,
                None => {
                    let mut hi = 1u64;
                    while &self.eval(hi) < bound {
                        hi = hi.checked_mul(2)?;
                    }
                    hi
                }
            };
            let mut lo = 0u64;
            if &self.eval(0) >= bound {
                return Some(0);
            }
            // invariant: f(lo) < bound <= f(hi)
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if &self.eval(mid) >= bound {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        let mut m = 0u64;
        loop {
            if &self.eval(m) >= bound {
                return Some(m);
            }
            if limit.is_some_and(|s| m >= s) {
                return None;
            }
            m += 1;
        }
    }

    /// `Σ_{k<m} f(k)` in closed form, for presentations that have one:
    /// prefixes, integer-coefficient polynomials, squares and powers of two.
    pub fn prefix_sum(&self, m: u64) -> Option<BigUint> {
        match self {
            OmegaFunction::Prefix { values } => {
                let len = values.len() as u64;
                let head: BigUint = values.iter().take(m.min(len) as usize).sum();
                let rest = BigUint::from(m.saturating_sub(len)) * values.last().expect("nonempty prefix");
                Some(head + rest)
            }
            OmegaFunction::Formula(Formula::Linear { a, b }) => {
                let coeffs = [b.clone(), a.clone()];
                integer_poly_prefix_sum(&coeffs, m)
            }
            OmegaFunction::Formula(Formula::Poly { coeffs }) => integer_poly_prefix_sum(coeffs, m),
            OmegaFunction::Formula(Formula::Square) => {
                let m = BigUint::from(m);
                if m.is_zero() {
                    return Some(BigUint::zero());
                }
                let one = BigUint::one();
                Some((&m - &one) * &m * (BigUint::from(2u32) * &m - &one) / BigUint::from(6u32))
            }
            OmegaFunction::Formula(Formula::Pow2) => Some((BigUint::one() << m) - BigUint::one()),
            _ => None,
        }
    }
}

fn binomial(n: &BigUint, k: u64) -> BigUint {
    if *n < BigUint::from(k) {
        return BigUint::zero();
    }
    // each partial product is itself a binomial coefficient, so division is exact
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - BigUint::from(i)) / BigUint::from(i + 1))
}

/// `Σ_{k<m} P(k)` via forward differences, valid when every coefficient is
/// an integer (so the floor in the formula is the identity).
fn integer_poly_prefix_sum(coeffs: &[Rational], m: u64) -> Option<BigUint> {
    if !coeffs.iter().all(|c| c.denom().is_one()) {
        return None;
    }
    let degree = coeffs.len();
    let eval = |k: u64| -> Rational {
        let x = from_u64(k);
        coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * &x + c)
    };
    // Δ^j P(0) for j = 0..degree
    let mut diffs: Vec<Rational> = (0..degree as u64).map(eval).collect();
    let mut leading = Vec::with_capacity(degree);
    while let Some(first) = diffs.first().cloned() {
        leading.push(first);
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let mbig = BigUint::from(m);
    let mut total = Rational::zero();
    for (j, d) in leading.iter().enumerate() {
        total += d * from_biguint(&binomial(&mbig, j as u64 + 1));
    }
    total.to_integer().to_biguint()
}

/// The exact finite-horizon evidence about `f ≤* g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub horizon: u64,
    /// `{i < horizon : f(i) > g(i)}` in increasing order.
    pub violations: Vec<u64>,
    pub last_violation: Option<u64>,
}

impl ViolationReport {
    pub fn is_clean_from(&self, index: u64) -> bool {
        self.last_violation.is_none_or(|v| v < index)
    }
}

pub fn le_star_verdict(f: &OmegaFunction, g: &OmegaFunction, horizon: u64) -> Result<ViolationReport> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    let fs = f.tabulate(horizon);
    let gs = g.tabulate(horizon);
    let violations: Vec<u64> = (0..horizon).filter(|&i| fs[i as usize] > gs[i as usize]).collect();
    Ok(ViolationReport {
        horizon,
        last_violation: violations.last().copied(),
        violations,
    })
}

pub fn diagonal_dominator(family: &[OmegaFunction]) -> Result<OmegaFunction> {
    if family.is_empty() {
        return Err(Error::invalid("diagonal dominator of an empty family"));
    }
    Ok(OmegaFunction::Dominator { members: family.to_vec() })
}

/// Running maximum. Envelopes of envelopes collapse, so the operation is
/// idempotent on presentations as well as on values.
pub fn monotone_envelope(f: &OmegaFunction) -> OmegaFunction {
    match f {
        OmegaFunction::Envelope { .. } => f.clone(),
        _ => OmegaFunction::Envelope { of: Box::new(f.clone()) },
    }
}
