use serde::{Deserialize, Serialize};

use super::{DenseOpenOracle, OracleMeta, Refinement};
use crate::error::{Error, Result};
use crate::exact::rational::serde_str;
use crate::exact::{ClosedInterval, Interval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStage {
    pub oracle: String,
    pub query: Interval,
    /// The oracle's answer.
    pub refined: ClosedInterval,
    /// What the chain keeps: `refined`, or its middle half when `refined`
    /// is wider than half the query.
    pub kept: ClosedInterval,
    pub meta: OracleMeta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaireChain {
    pub start: Interval,
    pub stages: Vec<ChainStage>,
    #[serde(with = "serde_str")]
    pub final_point: Rational,
}

impl BaireChain {
    /// The innermost interval: the last kept one, or the start.
    pub fn innermost(&self) -> Interval {
        self.stages.last().map_or_else(|| self.start.clone(), |s| s.kept.interior())
    }

    pub fn widths(&self) -> Vec<Rational> {
        self.stages.iter().map(|s| s.kept.width()).collect()
    }
}

fn breach(stage: usize, detail: impl Into<String>) -> Error {
    Error::OracleBreach {
        stage,
        detail: detail.into(),
    }
}

/// Checks the oracle contract on one answer and decides what to keep.
fn accept(stage: usize, oracle: &dyn DenseOpenOracle, query: &Interval, r: &Refinement) -> Result<ClosedInterval> {
    let iv = &r.interval;
    if !iv.is_inside(query) {
        return Err(breach(stage, format!("{iv} is not strictly inside the query {query}")));
    }
    for x in [&iv.lo, &iv.hi, &iv.midpoint()] {
        if !oracle.witnesses(x, r)? {
            return Err(breach(
                stage,
                format!("{} is not in the represented set", crate::exact::format_rational(x)),
            ));
        }
    }
    let qw = query.length().expect("bounded query");
    if iv.width() * Rational::from_integer(2.into()) <= qw {
        Ok(iv.clone())
    } else {
        super::middle_half(&iv.interior())
    }
}

/// Runs the oracles in order. `next(t, previous)` builds the oracle for
/// stage `t`, seeing the previous stage's record.
pub fn baire_chain_with<'a, F>(start: &Interval, stages: usize, mut next: F) -> Result<BaireChain>
where
    F: FnMut(usize, Option<&ChainStage>) -> Result<Box<dyn DenseOpenOracle + 'a>>,
{
    if !start.is_bounded() {
        return Err(Error::invalid(format!("start {start} must be bounded")));
    }
    let mut oracles: Vec<Box<dyn DenseOpenOracle + 'a>> = Vec::with_capacity(stages);
    let mut records: Vec<ChainStage> = Vec::with_capacity(stages);
    let mut query = start.clone();
    for t in 0..stages {
        let oracle = next(t, records.last())?;
        let refined = oracle.refine(&query)?;
        let kept = accept(t, oracle.as_ref(), &query, &refined)?;
        let next_query = kept.interior();
        records.push(ChainStage {
            oracle: oracle.descriptor(),
            query: std::mem::replace(&mut query, next_query),
            refined: refined.interval,
            kept,
            meta: refined.meta,
        });
        oracles.push(oracle);
    }
    let final_point = query.midpoint().expect("bounded");
    for (t, (oracle, rec)) in oracles.iter().zip(&records).enumerate() {
        let r = Refinement {
            interval: rec.refined.clone(),
            meta: rec.meta.clone(),
        };
        if !oracle.witnesses(&final_point, &r)? {
            return Err(breach(t, "final point escaped the represented set"));
        }
    }
    Ok(BaireChain {
        start: start.clone(),
        stages: records,
        final_point,
    })
}

pub fn baire_witness(oracles: &[&dyn DenseOpenOracle], start: &Interval) -> Result<BaireChain> {
    baire_chain_with(start, oracles.len(), |t, _| Ok(Box::new(Forward(oracles[t]))))
}

struct Forward<'a>(&'a dyn DenseOpenOracle);

impl DenseOpenOracle for Forward<'_> {
    fn descriptor(&self) -> String {
        self.0.descriptor()
    }
    fn refine(&self, query: &Interval) -> Result<Refinement> {
        self.0.refine(query)
    }
    fn witnesses(&self, x: &Rational, r: &Refinement) -> Result<bool> {
        self.0.witnesses(x, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{Punctured, WholeLine};
    use crate::exact::rational::{int, q};

    #[test]
    fn whole_line_keeps_middle_halves() {
        let start = Interval::finite(int(0), int(1)).unwrap();
        let w = WholeLine;
        let chain = baire_witness(&[&w, &w, &w], &start).unwrap();
        assert_eq!(chain.final_point, q(1, 2));
        assert_eq!(chain.widths(), vec![q(1, 2), q(1, 4), q(1, 8)]);
        assert_eq!(chain.stages[0].kept, ClosedInterval::new(q(1, 4), q(3, 4)).unwrap());
    }

    #[test]
    fn no_oracles_gives_start_midpoint() {
        let start = Interval::finite(q(1, 3), int(2)).unwrap();
        let chain = baire_witness(&[], &start).unwrap();
        assert!(chain.stages.is_empty());
        assert_eq!(chain.final_point, q(7, 6));
    }

    #[test]
    fn punctured_line_avoids_every_point() {
        let start = Interval::finite(int(0), int(1)).unwrap();
        let pts = [q(1, 2), q(3, 8), q(5, 16)];
        let oracles: Vec<Punctured> = pts.iter().map(|p| Punctured { point: p.clone() }).collect();
        let refs: Vec<&dyn DenseOpenOracle> = oracles.iter().map(|o| o as &dyn DenseOpenOracle).collect();
        let chain = baire_witness(&refs, &start).unwrap();
        for p in &pts {
            assert_ne!(&chain.final_point, p);
        }
        // the midpoint of the start itself is avoided
        assert!(chain.final_point < q(1, 2));
    }

    struct Liar;

    impl DenseOpenOracle for Liar {
        fn descriptor(&self) -> String {
            "liar".into()
        }
        fn refine(&self, query: &Interval) -> Result<Refinement> {
            let (a, b) = query.bounds().unwrap();
            Ok(Refinement {
                interval: ClosedInterval::new(a.clone(), b.clone()).unwrap(),
                meta: OracleMeta::Plain,
            })
        }
        fn witnesses(&self, _: &Rational, _: &Refinement) -> Result<bool> {
            Ok(true)
        }
    }

    #[test]
    fn contract_breach_names_the_stage() {
        let start = Interval::finite(int(0), int(1)).unwrap();
        let err = baire_witness(&[&WholeLine, &Liar], &start).unwrap_err();
        assert!(matches!(err, Error::OracleBreach { stage: 1, .. }), "{err:?}");
    }
}
