//! Translates `U - s(n)` of a set unbounded above, for a sequence whose
//! gaps shrink to zero, and the witness `r` with infinitely many
//! `r + s(n)` in `U`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::baire::{baire_chain_with, BaireChain};
use super::{bounded_query, middle_half, DenseOpenOracle, OracleMeta, Refinement};
use crate::error::{Error, Result};
use crate::exact::rational::{abs, serde_str};
use crate::exact::{format_rational, Interval, PatternSet, Rational};
use crate::sequence::{first_index_above, DivergingSequence};

pub struct TranslationDenseOracle<'a> {
    set: &'a PatternSet,
    seq: &'a dyn DivergingSequence,
    t: u64,
}

pub fn translation_dense_oracle<'a>(set: &'a PatternSet, seq: &'a dyn DivergingSequence, t: u64) -> Result<TranslationDenseOracle<'a>> {
    if !set.unbounded_above() {
        return Err(Error::invalid("set must be unbounded above"));
    }
    Ok(TranslationDenseOracle { set, seq, t })
}

impl TranslationDenseOracle<'_> {
    fn window(&self, n: u64, component: &Interval) -> Result<Interval> {
        let s = self.seq.term(n)?;
        Ok(component.affine(&Rational::from_integer(1.into()), &-s))
    }

    /// Index `n >= n0` putting the centre of `component - s(n)` nearest
    /// the centre of the query. Once gaps past `n0` are below half the
    /// query width, the window then meets the query, and contains it as
    /// soon as the component is twice as wide.
    fn aligned_index(&self, n0: u64, component: &Interval, a: &Rational, b: &Rational) -> Result<u64> {
        let Some(mid) = component.midpoint() else {
            // unbounded above: s(n) > u - a puts the whole query inside
            let u = component
                .lo()
                .finite()
                .expect("a component unbounded below cannot lie above a bound");
            return first_index_above(self.seq, &(u - a), n0);
        };
        let target = mid - (a + b) / Rational::from_integer(2.into());
        let n1 = first_index_above(self.seq, &target, n0)?;
        if n1 == n0 {
            return Ok(n1);
        }
        let above = abs(&(self.seq.term(n1)? - &target));
        let below = abs(&(self.seq.term(n1 - 1)? - &target));
        Ok(if below <= above { n1 - 1 } else { n1 })
    }
}

impl DenseOpenOracle for TranslationDenseOracle<'_> {
    fn descriptor(&self) -> String {
        format!("translation:t={}", self.t)
    }

    fn refine(&self, query: &Interval) -> Result<Refinement> {
        let (a, b) = bounded_query(query)?;
        let eps = (b - a) / Rational::from_integer(2.into());
        let n0 = self.t.max(self.seq.gap_modulus(&eps)?);
        let threshold = self.seq.term(n0)? + b;
        let component = match self.set.leftmost_lo_above(&threshold)? {
            Some(c) => c,
            None => self
                .set
                .top_ray()
                .ok_or_else(|| Error::invalid("set has no component above the threshold"))?,
        };
        let mut n = self.aligned_index(n0, &component, a, b)?;
        let mut inside = self.window(n, &component)?.intersect(query);
        if inside.is_none() {
            // windows slide left in steps below eps; scan for the first that meets the query
            let u = component.lo().finite().expect("component above the threshold").clone();
            let end = self.seq.divergence_modulus(&(u - a))?.max(n0);
            n = n0;
            while inside.is_none() && n <= end {
                inside = self.window(n, &component)?.intersect(query);
                if inside.is_none() {
                    n += 1;
                }
            }
        }
        let inside = inside.ok_or_else(|| {
            Error::capability(
                "gap_modulus",
                format!("no translate of {component} meets {query}: gap modulus unsound"),
            )
        })?;
        Ok(Refinement {
            interval: middle_half(&inside)?,
            meta: OracleMeta::Translated { n, component },
        })
    }

    fn witnesses(&self, r: &Rational, refinement: &Refinement) -> Result<bool> {
        let OracleMeta::Translated { n, .. } = &refinement.meta else {
            return Err(Error::invalid("translation refinement without shift metadata"));
        };
        Ok(*n >= self.t && self.set.member(&(r + self.seq.term(*n)?)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateHit {
    pub n: u64,
    #[serde(with = "serde_str")]
    pub point: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemarkWitness {
    pub chain: BaireChain,
    #[serde(with = "serde_str")]
    pub r: Rational,
    pub hits: Vec<TranslateHit>,
}

/// A point `r` of `target` with `hits` distinct indices `n` such that
/// `r + s(n) ∈ U`. Stage `t` starts past the previous stage's index.
pub fn remark_witness(set: &PatternSet, seq: &dyn DivergingSequence, target: &Interval, hits: usize) -> Result<RemarkWitness> {
    let chain = baire_chain_with(target, hits, |_, prev| {
        let t = match prev.map(|s| &s.meta) {
            Some(OracleMeta::Translated { n, .. }) => n + 1,
            _ => 0,
        };
        Ok(Box::new(translation_dense_oracle(set, seq, t)?))
    })?;
    let r = chain.final_point.clone();
    let hits = chain
        .stages
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let OracleMeta::Translated { n, .. } = &s.meta else {
                unreachable!("translation oracle")
            };
            let point = &r + seq.term(*n)?;
            if !set.member(&point) {
                return Err(Error::OracleBreach {
                    stage: t,
                    detail: format!("r + s({n}) = {} is not in the set", format_rational(&point)),
                });
            }
            Ok(TranslateHit { n: *n, point })
        })
        .collect::<Result<Vec<_>>>()?;
    if hits.windows(2).any(|w| w[0].n.cmp(&w[1].n) != Ordering::Less) {
        return Err(Error::OracleBreach {
            stage: hits.len(),
            detail: "hit indices do not strictly increase".into(),
        });
    }
    Ok(RemarkWitness { chain, r, hits })
}
