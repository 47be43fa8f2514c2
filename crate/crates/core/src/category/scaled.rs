//! Scaled unions `⋃_{k>=n} k·U` of a set `U` clustering at zero, and the
//! witness `x` with infinitely many `x/k` in `U`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::baire::{baire_chain_with, BaireChain};
use super::{bounded_query, middle_half, DenseOpenOracle, OracleMeta, Refinement};
use crate::enclosure::{ln_enclosure, Enclosure};
use crate::error::{Error, Result};
use crate::exact::rational::{floor, from_biguint, serde_nat, serde_str};
use crate::exact::{format_rational, Endpoint, Interval, PatternSet, Rational};

pub struct ScaledUnionOracle<'a> {
    set: &'a PatternSet,
    n: BigUint,
}

pub fn scaled_union_oracle(set: &PatternSet, n: BigUint) -> Result<ScaledUnionOracle<'_>> {
    if n.is_zero() {
        return Err(Error::invalid("scaled union needs n >= 1"));
    }
    if !set.is_positive() {
        return Err(Error::invalid("set must lie in (0, inf)"));
    }
    if !set.clustered_at_zero() {
        return Err(Error::invalid("set does not meet every (0, eps)"));
    }
    Ok(ScaledUnionOracle { set, n })
}

impl DenseOpenOracle for ScaledUnionOracle<'_> {
    fn descriptor(&self) -> String {
        format!("scaled-union:n={}", self.n)
    }

    fn refine(&self, query: &Interval) -> Result<Refinement> {
        let (p, q) = bounded_query(query)?;
        if !p.is_positive() {
            return Err(Error::invalid(format!("query {query} must lie in (0, inf)")));
        }
        let by_n = p / from_biguint(&self.n);
        let width = q - p;
        let b = if width < by_n { width } else { by_n };
        let component = self
            .set
            .largest_lo_below(&b)
            .ok_or_else(|| Error::invalid(format!("no component below {}", format_rational(&b))))?;
        let zero = Rational::zero();
        let lo = component.lo().finite().map_or(zero.clone(), |l| l.clone().max(zero));
        let hi = match component.hi() {
            Endpoint::Finite(h) if *h < b => h.clone(),
            _ => b.clone(),
        };
        let x = (lo + hi) / Rational::from_integer(2.into());
        let k = floor(&(p / &x)) + BigInt::one();
        let kr = Rational::from_integer(k.clone());
        let scaled = component.affine(&kr, &Rational::zero());
        let inside = scaled
            .intersect(query)
            .ok_or_else(|| Error::invalid("scaled component misses the query"))?;
        Ok(Refinement {
            interval: middle_half(&inside)?,
            meta: OracleMeta::Scaled {
                k: k.to_biguint().expect("k >= 1"),
                component,
            },
        })
    }

    fn witnesses(&self, x: &Rational, r: &Refinement) -> Result<bool> {
        let OracleMeta::Scaled { k, component } = &r.meta else {
            return Err(Error::invalid("scaled-union refinement without scale metadata"));
        };
        let y = x / from_biguint(k);
        Ok(component.contains(&y) && self.set.member(&y))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledHit {
    #[serde(with = "serde_nat")]
    pub k: BigUint,
    #[serde(with = "serde_str")]
    pub quotient: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem3Witness {
    pub chain: BaireChain,
    #[serde(with = "serde_str")]
    pub x: Rational,
    pub hits: Vec<ScaledHit>,
}

/// A point `x` of `start` with `depth` distinct `k` such that `x/k ∈ U`.
/// Stage `t` uses the union over `k >= k_{t-1} + 1`, so the `k` strictly increase.
pub fn theorem3_witness(set: &PatternSet, depth: usize, start: &Interval) -> Result<Theorem3Witness> {
    let (p, _) = bounded_query(start)?;
    if !p.is_positive() {
        return Err(Error::invalid(format!("start {start} must lie in (0, inf)")));
    }
    let chain = baire_chain_with(start, depth, |_, prev| {
        let n = match prev.map(|s| &s.meta) {
            Some(OracleMeta::Scaled { k, .. }) => k + 1u32,
            _ => BigUint::one(),
        };
        Ok(Box::new(scaled_union_oracle(set, n)?))
    })?;
    let x = chain.final_point.clone();
    let hits = chain
        .stages
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let OracleMeta::Scaled { k, .. } = &s.meta else {
                unreachable!("scaled oracle")
            };
            let quotient = &x / from_biguint(k);
            if !set.member(&quotient) {
                return Err(Error::OracleBreach {
                    stage: t,
                    detail: format!("x/{k} = {} is not in the set", format_rational(&quotient)),
                });
            }
            Ok(ScaledHit { k: k.clone(), quotient })
        })
        .collect::<Result<_>>()?;
    Ok(Theorem3Witness { chain, x, hits })
}

/// One hit seen through `y = -ln x`: the point `-ln x + ln(n + 1)` with
/// `n = k - 1`, against the image `(-ln hi, -ln lo)` of the component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogFormHit {
    #[serde(with = "serde_nat")]
    pub n: BigUint,
    pub point: Enclosure,
    /// `None` for an unbounded side.
    pub image_lo: Option<Enclosure>,
    pub image_hi: Option<Enclosure>,
    /// The enclosure of the point lies strictly between the image bounds.
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogFormView {
    pub approximate: bool,
    pub precision_bits: u32,
    pub shift: Enclosure,
    pub hits: Vec<LogFormHit>,
}

pub fn log_form_view(witness: &Theorem3Witness, bits: u32) -> Result<LogFormView> {
    let shift = ln_enclosure(&witness.x, bits)?.neg();
    let hits = witness
        .chain
        .stages
        .iter()
        .zip(&witness.hits)
        .map(|(stage, hit)| {
            let OracleMeta::Scaled { component, .. } = &stage.meta else {
                unreachable!("scaled oracle")
            };
            let point = shift.add(&ln_enclosure(&from_biguint(&hit.k), bits)?);
            let neg_ln = |e: &Endpoint| -> Result<Option<Enclosure>> {
                match e.finite() {
                    Some(v) if v.is_positive() => Ok(Some(ln_enclosure(v, bits)?.neg())),
                    _ => Ok(None),
                }
            };
            let image_lo = neg_ln(component.hi())?;
            let image_hi = neg_ln(component.lo())?;
            let separated = image_lo.as_ref().is_none_or(|e| e.hi < point.lo) && image_hi.as_ref().is_none_or(|e| point.hi < e.lo);
            Ok(LogFormHit {
                n: &hit.k - 1u32,
                point,
                image_lo,
                image_hi,
                separated,
            })
        })
        .collect::<Result<_>>()?;
    Ok(LogFormView {
        approximate: true,
        precision_bits: bits,
        shift,
        hits,
    })
}
