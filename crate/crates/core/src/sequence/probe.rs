use serde::{Deserialize, Serialize};

use super::{DivergingSequence, SequenceFamily};
use crate::error::{Error, Result};
use crate::exact::OpenSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "lowercase")]
pub enum ProbeOutcome {
    /// The first member (in family order) with at least `K` indices below
    /// the horizon whose terms lie in `U`, and the first `K` such indices.
    Witness { member: usize, hits: Vec<u64> },
    /// No member reached `K` hits below the horizon. This never refutes
    /// condition (C); it only reports a search that ran out.
    Exhausted { horizon: u64 },
}

/// Finite-horizon semi-decision of "some member has infinitely many terms in U".
pub fn condition_c_probe(family: &SequenceFamily, set: &OpenSet, hits: u64, horizon: u64) -> Result<ProbeOutcome> {
    if hits == 0 {
        return Err(Error::invalid("hit target K must be positive"));
    }
    if !set.unbounded_above() {
        return Err(Error::invalid("probe set must be unbounded above"));
    }
    for (member, seq) in family.members().iter().enumerate() {
        let mut found = Vec::new();
        for n in 0..horizon {
            if set.member(&seq.term(n)?) {
                found.push(n);
                if found.len() as u64 == hits {
                    return Ok(ProbeOutcome::Witness { member, hits: found });
                }
            }
        }
    }
    Ok(ProbeOutcome::Exhausted { horizon })
}
