//! Dense open oracles and the nested-interval chains that thread them.
//!
//! An oracle represents a dense open set by answering, for any bounded
//! query interval, a closed rational subinterval that lies inside both the
//! query and the set. Chaining finitely many oracles yields a point in the
//! intersection of their sets, with each membership checkable exactly.

mod baire;
mod bump;
mod scaled;
mod translate;
mod wave_probe;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{serde_nat, serde_str};
use crate::exact::{ClosedInterval, Interval, Rational};

pub use baire::{baire_chain_with, baire_witness, BaireChain, ChainStage};
pub use bump::{bump_transfer_demo, BumpDemo, MemberZeroCheck, Peak, TentFunction};
pub use scaled::{
    log_form_view, scaled_union_oracle, theorem3_witness, LogFormHit, LogFormView, ScaledHit, ScaledUnionOracle, Theorem3Witness,
};
pub use translate::{remark_witness, translation_dense_oracle, RemarkWitness, TranslateHit, TranslationDenseOracle};
pub use wave_probe::{farey, wave_family_probe, WaveProbeOutcome, WaveVariant};

/// What an oracle used to justify a refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OracleMeta {
    Plain,
    /// The refinement steers clear of `point`.
    Avoid {
        #[serde(with = "serde_str")]
        point: Rational,
    },
    /// The refinement lies in `k · component`.
    Scaled {
        #[serde(with = "serde_nat")]
        k: BigUint,
        component: Interval,
    },
    /// The refinement lies in `component - s(n)`.
    Translated {
        n: u64,
        component: Interval,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub interval: ClosedInterval,
    pub meta: OracleMeta,
}

pub trait DenseOpenOracle {
    fn descriptor(&self) -> String;

    /// A closed subinterval of `query` inside the represented set.
    fn refine(&self, query: &Interval) -> Result<Refinement>;

    /// Exact membership of `x` in the represented set, using the witness
    /// data of `refinement`.
    fn witnesses(&self, x: &Rational, refinement: &Refinement) -> Result<bool>;
}

pub(crate) fn bounded_query(query: &Interval) -> Result<(&Rational, &Rational)> {
    query
        .bounds()
        .ok_or_else(|| Error::invalid(format!("query {query} must be bounded")))
}

pub(crate) fn middle_half(interval: &Interval) -> Result<ClosedInterval> {
    ClosedInterval::middle_half(interval).ok_or_else(|| Error::invalid(format!("interval {interval} must be bounded")))
}

/// The whole line: refinement is the middle half of the query.
#[derive(Debug, Clone, Copy, Default)]
pub struct WholeLine;

impl DenseOpenOracle for WholeLine {
    fn descriptor(&self) -> String {
        "whole-line".into()
    }

    fn refine(&self, query: &Interval) -> Result<Refinement> {
        Ok(Refinement {
            interval: middle_half(query)?,
            meta: OracleMeta::Plain,
        })
    }

    fn witnesses(&self, _x: &Rational, _r: &Refinement) -> Result<bool> {
        Ok(true)
    }
}

/// The line minus one point. When the point splits the query, the larger
/// side is kept (the left one on ties).
#[derive(Debug, Clone)]
pub struct Punctured {
    pub point: Rational,
}

impl DenseOpenOracle for Punctured {
    fn descriptor(&self) -> String {
        format!("punctured:{}", crate::exact::format_rational(&self.point))
    }

    fn refine(&self, query: &Interval) -> Result<Refinement> {
        let (a, b) = bounded_query(query)?;
        let side = if query.contains(&self.point) {
            if &self.point - a >= b - &self.point {
                Interval::finite(a.clone(), self.point.clone())?
            } else {
                Interval::finite(self.point.clone(), b.clone())?
            }
        } else {
            query.clone()
        };
        Ok(Refinement {
            interval: middle_half(&side)?,
            meta: OracleMeta::Avoid { point: self.point.clone() },
        })
    }

    fn witnesses(&self, x: &Rational, _r: &Refinement) -> Result<bool> {
        Ok(*x != self.point)
    }
}
