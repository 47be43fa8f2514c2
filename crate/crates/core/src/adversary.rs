//! An open set, unbounded above, that every member of a finite family of
//! diverging sequences visits only finitely often.
//!
//! Construction: a base sequence `a_n ∈ (n, n+1)` avoiding every member
//! term, per-member least separation indices `h_α(n)`, a combined `h`, and
//! the union of `(a_n - 1/h(n), a_n + 1/h(n))`.

use std::collections::BTreeSet;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{ceil, floor, from_biguint, from_u64, serde_str, to_index, Rational};
use crate::exact::{Interval, OpenSet};
use crate::omega::{diagonal_dominator, OmegaFunction};
use crate::sequence::{first_index_above, terms_in, DivergingSequence, SequenceFamily};

/// `a_n`: the dyadic rational in `(n, n+1)` of least denominator (then
/// least numerator) that is not a term of any member.
#[derive(Debug)]
pub struct AvoidingBase {
    family: SequenceFamily,
    cache: Mutex<Vec<Rational>>,
}

pub fn avoiding_base(family: &SequenceFamily) -> AvoidingBase {
    AvoidingBase {
        family: family.clone(),
        cache: Mutex::new(Vec::new()),
    }
}

impl AvoidingBase {
    fn choose(&self, n: u64) -> Result<Rational> {
        let lo = from_u64(n);
        let window = Interval::finite(lo.clone(), from_u64(n + 1))?;
        let mut forbidden = BTreeSet::new();
        for member in self.family.members() {
            forbidden.extend(terms_in(member, &window)?.into_iter().map(|(_, t)| t));
        }
        let mut denom = BigInt::from(2);
        loop {
            let mut k = BigInt::one();
            while k < denom {
                let candidate = &lo + Rational::new(k.clone(), denom.clone());
                if !forbidden.contains(&candidate) {
                    return Ok(candidate);
                }
                k += 2;
            }
            denom <<= 1;
        }
    }

    pub fn family(&self) -> &SequenceFamily {
        &self.family
    }
}

impl DivergingSequence for AvoidingBase {
    fn term(&self, n: u64) -> Result<Rational> {
        {
            let cache = self.cache.lock().expect("base cache lock poisoned");
            if let Some(v) = cache.get(n as usize) {
                return Ok(v.clone());
            }
        }
        let value = self.choose(n)?;
        let mut cache = self.cache.lock().expect("base cache lock poisoned");
        // the choice is a pure function of n, so racing writers agree
        while (cache.len() as u64) < n {
            let k = cache.len() as u64;
            let v = self.choose(k)?;
            cache.push(v);
        }
        if cache.len() as u64 == n {
            cache.push(value.clone());
        }
        Ok(value)
    }

    /// `a_n > n`, so `n >= floor(B) + 1` puts the term above `B`.
    fn divergence_modulus(&self, bound: &Rational) -> Result<u64> {
        to_index(&(floor(bound) + 1))
    }

    fn entry_index(&self, lo: &Rational) -> Result<u64> {
        to_index(&floor(lo))
    }

    fn is_monotone(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `h(n) = max_α h_α(n)`: no member term in any interval.
    StrongMax,
    /// `h(n) = max{h_j(n) : j <= n} + 1`: member `α` can only be hit by
    /// intervals with index below `α`.
    Diagonal,
}

impl Mode {
    /// First interval index from which member `alpha` is guaranteed clear.
    pub fn tail_start(self, alpha: usize) -> u64 {
        match self {
            Mode::StrongMax => 0,
            Mode::Diagonal => alpha as u64,
        }
    }
}

/// The member term closest to `a_n` within distance 1, certifying that
/// radius `1/(h_α(n) - 1)` would capture a term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NearestTerm {
    pub index: u64,
    #[serde(with = "serde_str")]
    pub term: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationProfile {
    pub mode: Mode,
    pub horizon: u64,
    #[serde(with = "crate::exact::rational::serde_vec")]
    pub base: Vec<Rational>,
    /// `h_per_member[α][n]`
    pub h_per_member: Vec<Vec<u64>>,
    pub nearest: Vec<Vec<Option<NearestTerm>>>,
    #[serde(with = "crate::exact::rational::serde_nat::vec")]
    pub h_combined: Vec<BigUint>,
}

/// Terms of `member` inside `(center - 1, center + 1)` that can be nearest
/// to `center`: for a monotone member, the two neighbours of `center`.
fn nearest_candidates(member: &dyn DivergingSequence, center: &Rational) -> Result<Vec<(u64, Rational)>> {
    let one = Rational::one();
    let window = Interval::finite(center - &one, center + &one)?;
    if !member.is_monotone() {
        return terms_in(member, &window);
    }
    let above = first_index_above(member, center, 0)?;
    let mut out = Vec::with_capacity(2);
    if above > 0 {
        out.push((above - 1, member.term(above - 1)?));
    }
    out.push((above, member.term(above)?));
    out.retain(|(_, t)| window.contains(t));
    Ok(out)
}

fn separation_cell(member: &dyn DivergingSequence, alpha: usize, n: u64, center: &Rational) -> Result<(u64, Option<NearestTerm>)> {
    let one = Rational::one();
    let mut nearest: Option<(Rational, u64, Rational)> = None;
    for (idx, t) in nearest_candidates(member, center)? {
        let d = if &t > center { &t - center } else { center - &t };
        if d.is_zero() {
            return Err(Error::Collision { member: alpha, n, term: t });
        }
        if nearest.as_ref().is_none_or(|(best, _, _)| d < *best) {
            nearest = Some((d, idx, t));
        }
    }
    match nearest {
        None => Ok((1, None)),
        Some((d, index, term)) => {
            // least h >= 1 with 1/h <= d
            let h = to_index(&ceil(&(one / d)))?;
            Ok((h.max(1), Some(NearestTerm { index, term })))
        }
    }
}

/// Tabulates `h_α(n)` for every member and `n < horizon`, and the combined `h`.
pub fn separation_profile(family: &SequenceFamily, base: &dyn DivergingSequence, mode: Mode, horizon: u64) -> Result<SeparationProfile> {
    let base_terms = base.terms_range(0, horizon)?;
    let rows: Vec<(Vec<u64>, Vec<Option<NearestTerm>>)> = family
        .members()
        .par_iter()
        .enumerate()
        .map(|(alpha, member)| {
            let mut hs = Vec::with_capacity(horizon as usize);
            let mut near = Vec::with_capacity(horizon as usize);
            for (n, center) in base_terms.iter().enumerate() {
                let (h, w) = separation_cell(member, alpha, n as u64, center)?;
                hs.push(h);
                near.push(w);
            }
            Ok((hs, near))
        })
        .collect::<Result<_>>()?;
    let (h_per_member, nearest): (Vec<_>, Vec<_>) = rows.into_iter().unzip();

    let h_combined = match mode {
        Mode::StrongMax => (0..horizon as usize)
            .map(|n| BigUint::from(h_per_member.iter().map(|row| row[n]).max().unwrap_or(1)))
            .collect(),
        Mode::Diagonal => {
            let fns = h_per_member
                .iter()
                .map(|row| OmegaFunction::prefix(row.iter().map(|&v| BigUint::from(v)).collect()))
                .collect::<Result<Vec<_>>>();
            match fns {
                // horizon 0: nothing to combine
                Err(_) => Vec::new(),
                Ok(fns) => diagonal_dominator(&fns)?.tabulate(horizon),
            }
        }
    };
    Ok(SeparationProfile {
        mode,
        horizon,
        base: base_terms,
        h_per_member,
        nearest,
        h_combined,
    })
}

impl SeparationProfile {
    /// `h_α` as a prefix-presented function (valid below the horizon).
    pub fn h_member_fn(&self, alpha: usize) -> Result<OmegaFunction> {
        OmegaFunction::prefix(self.h_per_member[alpha].iter().map(|&v| BigUint::from(v)).collect())
    }

    /// `(a_n - 1/h(n), a_n + 1/h(n))`.
    pub fn interval(&self, n: usize) -> Interval {
        let r = Rational::one() / from_biguint(&self.h_combined[n]);
        Interval::finite(&self.base[n] - &r, &self.base[n] + &r).expect("positive radius")
    }

    pub fn intervals(&self) -> Vec<Interval> {
        (0..self.base.len()).map(|n| self.interval(n)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedHit {
    /// Index of the member term.
    pub n: u64,
    /// Smallest adversarial interval index containing the term.
    pub interval_index: u64,
    #[serde(with = "serde_str")]
    pub term: Rational,
}

/// Machine-checkable tail argument: for every interval index
/// `n >= from_index`, `h(n) >= h_α(n)` (strictly, in diagonal mode), so
/// those intervals contain no term of the member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailClaim {
    pub kind: Mode,
    pub from_index: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceCertificate {
    pub member: usize,
    pub mode: Mode,
    pub horizon: u64,
    pub hits: Vec<CertifiedHit>,
    pub tail: TailClaim,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversarialSet {
    pub open_set: OpenSet,
    pub certificates: Vec<AvoidanceCertificate>,
}

/// Hits of `member` in intervals `0..upto`, one entry per term index.
pub(crate) fn hits_in_intervals(member: &dyn DivergingSequence, intervals: &[Interval]) -> Result<Vec<CertifiedHit>> {
    let mut seen = BTreeSet::new();
    let mut hits = Vec::new();
    for (k, interval) in intervals.iter().enumerate() {
        for (n, term) in terms_in(member, interval)? {
            if seen.insert(n) {
                hits.push(CertifiedHit {
                    n,
                    interval_index: k as u64,
                    term,
                });
            }
        }
    }
    hits.sort_by_key(|h| h.n);
    Ok(hits)
}

/// `U_horizon` and one certificate per member. Only the finitely many
/// intervals before each member's tail start are enumerated; the rest are
/// cleared by the tail claim.
pub fn adversarial_open_set(family: &SequenceFamily, profile: &SeparationProfile) -> Result<AdversarialSet> {
    let intervals = profile.intervals();
    let open_set = OpenSet::from_intervals(intervals.clone());
    let certificates = family
        .members()
        .iter()
        .enumerate()
        .map(|(alpha, member)| {
            let from = profile.mode.tail_start(alpha).min(profile.horizon);
            let hits = hits_in_intervals(member, &intervals[..from as usize])?;
            Ok(AvoidanceCertificate {
                member: alpha,
                mode: profile.mode,
                horizon: profile.horizon,
                hits,
                tail: TailClaim {
                    kind: profile.mode,
                    from_index: from,
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(AdversarialSet { open_set, certificates })
}

/// Convenience: base, profile and set in one call.
pub fn run_adversary(family: &SequenceFamily, mode: Mode, horizon: u64) -> Result<(SeparationProfile, AdversarialSet)> {
    let base = avoiding_base(family);
    let profile = separation_profile(family, &base, mode, horizon)?;
    let set = adversarial_open_set(family, &profile)?;
    Ok((profile, set))
}
