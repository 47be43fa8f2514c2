//! Re-checkers for every claim the constructions make.
//!
//! Each check recomputes from the raw inputs along a different route than
//! the constructor: linear scans instead of moduli-guided windows, sweeps
//! instead of gap bounds, direct membership instead of recorded metadata.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::adversary::{AdversarialSet, Mode, SeparationProfile};
use crate::category::{BaireChain, BumpDemo, OracleMeta, RemarkWitness, Theorem3Witness, WaveProbeOutcome, WaveVariant};
use crate::error::{Error, Result};
use crate::exact::rational::{abs, from_biguint, from_u64};
use crate::exact::{format_rational, Endpoint, OpenSet, PatternSet, Rational};
use crate::omega::OmegaFunction;
use crate::sequence::{DivergingSequence, ProbeOutcome, SequenceFamily};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            check: check.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_failures(check: impl Into<String>, failures: &[String], ok_detail: impl Into<String>) -> Self {
        match failures.first() {
            None => Check::new(check, true, ok_detail),
            Some(first) => Check::new(check, false, format!("{} failure(s); first: {first}", failures.len())),
        }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// `values[n] > f_j(n)` for all `j <= n`.
pub fn verify_dominator(family: &[OmegaFunction], values: &[BigUint]) -> Check {
    let mut failures = Vec::new();
    let rows: Vec<Vec<BigUint>> = family.iter().map(|f| f.tabulate(values.len() as u64)).collect();
    for (n, g) in values.iter().enumerate() {
        for (j, row) in rows.iter().enumerate().take(n + 1) {
            let v = &row[n];
            if v >= g {
                failures.push(format!("g({n}) = {g} <= f_{j}({n}) = {v}"));
            }
        }
    }
    Check::from_failures("dominator", &failures, format!("{} values checked", values.len()))
}

/// `values` is the least non-decreasing majorant of `f`: it majorizes `f`,
/// never decreases, and each step either stays flat or meets `f`.
pub fn verify_envelope(f: &OmegaFunction, values: &[BigUint]) -> Check {
    let mut failures = Vec::new();
    for (n, e) in values.iter().enumerate() {
        let v = f.eval(n as u64);
        if *e < v {
            failures.push(format!("envelope({n}) below f({n})"));
        }
        let tight = *e == v || (n > 0 && *e == values[n - 1]);
        if !tight {
            failures.push(format!("envelope({n}) = {e} is neither f({n}) nor the previous value"));
        }
        if n > 0 && *e < values[n - 1] {
            failures.push(format!("envelope decreases at {n}"));
        }
    }
    Check::from_failures("envelope", &failures, format!("{} values checked", values.len()))
}

/// Whether radius `r` around the terms covers `(i, ∞)`, by sweeping the
/// intervals in index order and looking for an uncovered point.
///
/// The sweep starts at the entry index for `i - r` and stops at the gap
/// modulus for `2r`, past which consecutive intervals overlap. Without a gap modulus, `window` terms past the
/// first term above `i + 1` are swept; a repeating gap of at least `2r`
/// shows up within one period.
pub fn brute_covered(s: &dyn DivergingSequence, i: &Rational, r: &Rational, window: u64) -> Result<bool> {
    let two_r = r * Rational::from_integer(2.into());
    let past_i = s.divergence_modulus(&(i + Rational::one()))?;
    let end = match s.gap_modulus(&two_r) {
        Ok(n) => n.max(past_i) + 1,
        Err(Error::Capability { .. }) => past_i + window,
        Err(e) => return Err(e),
    };
    let mut reach = i.clone();
    let mut prev: Option<Rational> = None;
    // earlier terms are <= i - r, so their intervals end at or before i
    let mut start = s.entry_index(&(i - r))?.min(end);
    while start <= end {
        let stop = (start + 1024).min(end + 1);
        for (k, t) in s.terms_range(start, stop)?.into_iter().enumerate() {
            if prev.as_ref().is_some_and(|p| *p >= t) {
                return Err(Error::NotIncreasing { index: start + k as u64 });
            }
            let (lo, hi) = (&t - r, &t + r);
            prev = Some(t);
            if hi <= reach {
                continue;
            }
            // `reach` itself is uncovered unless it is the excluded left end `i`
            if lo > reach || (lo == reach && reach != *i) {
                return Ok(false);
            }
            reach = hi;
        }
        start = stop;
    }
    Ok(true)
}

/// Largest `j <= j_max` with `brute_covered(s, i, 1/j)`, or 0.
pub fn brute_coverage(s: &dyn DivergingSequence, i: u64, j_max: u64, window: u64) -> Result<u64> {
    let iq = from_u64(i);
    for j in (1..=j_max).rev() {
        if brute_covered(s, &iq, &(Rational::one() / from_u64(j)), window)? {
            return Ok(j);
        }
    }
    Ok(0)
}

/// `h_α(n)` for one centre, from a table `terms[0..]` that reaches past
/// `center + 1`. When the caller has found the table strictly increasing it
/// is cut to the unit window by bisection; otherwise it is scanned in full.
pub fn separation_from_table(terms: &[Rational], increasing: bool, center: &Rational) -> Result<(u64, Option<(u64, Rational)>)> {
    let one = Rational::one();
    let (from, to) = if increasing {
        let lo = center - &one;
        let hi = center + &one;
        (terms.partition_point(|t| *t <= lo), terms.partition_point(|t| *t < hi))
    } else {
        (0, terms.len())
    };
    let mut best: Option<(Rational, u64, Rational)> = None;
    for (n, t) in terms.iter().enumerate().take(to).skip(from) {
        let d = abs(&(t - center));
        if d >= one {
            continue;
        }
        if best.as_ref().is_none_or(|b| d < b.0) {
            best = Some((d, n as u64, t.clone()));
        }
    }
    Ok(match best {
        None => (1, None),
        Some((d, n, t)) => {
            if d.is_zero() {
                return Err(Error::Collision { member: 0, n, term: t });
            }
            let mut h = 1u64;
            while Rational::one() / from_u64(h) > d {
                h += 1;
            }
            (h, Some((n, t)))
        }
    })
}

/// Separation values, their minimality, and the combined `h`.
pub fn verify_profile(family: &SequenceFamily, profile: &SeparationProfile) -> Result<Vec<Check>> {
    let mut wrong = Vec::new();
    let mut not_minimal = Vec::new();
    let mut minimality_cases = 0u64;
    let top = profile.base.iter().max().cloned().unwrap_or_else(Rational::zero) + Rational::one();
    for (alpha, member) in family.members().iter().enumerate() {
        let end = member.divergence_modulus(&top)? + 1;
        let terms = member.terms_range(0, end)?;
        let increasing = terms.windows(2).all(|w| w[0] < w[1]);
        for (n, center) in profile.base.iter().enumerate() {
            let h = profile.h_per_member[alpha][n];
            let (brute, _) = separation_from_table(&terms, increasing, center).map_err(|e| match e {
                Error::Collision { n: k, term, .. } => Error::Collision { member: alpha, n: k, term },
                other => other,
            })?;
            if brute != h {
                wrong.push(format!("h_{alpha}({n}) = {h}, rescan gives {brute}"));
            }
            if h > 1 {
                minimality_cases += 1;
                // radius 1/(h-1) must capture the recorded term, and it must be a real term
                let ok = profile.nearest[alpha][n].as_ref().is_some_and(|w| {
                    member.term(w.index).ok().as_ref() == Some(&w.term) && abs(&(&w.term - center)) < Rational::one() / from_u64(h - 1)
                });
                if !ok {
                    not_minimal.push(format!("h_{alpha}({n}) = {h}: radius 1/{} captures no term", h - 1));
                }
            }
        }
    }
    let mut weak = Vec::new();
    for n in 0..profile.base.len() {
        let h = &profile.h_combined[n];
        for (alpha, row) in profile.h_per_member.iter().enumerate() {
            let ha = BigUint::from(row[n]);
            let ok = match profile.mode {
                Mode::StrongMax => *h >= ha,
                Mode::Diagonal => alpha > n || *h > ha,
            };
            if !ok {
                weak.push(format!("h({n}) = {h} does not dominate h_{alpha}({n}) = {ha}"));
            }
        }
    }
    Ok(vec![
        Check::from_failures("separation-values", &wrong, "every h_α(n) matches a full rescan"),
        Check::from_failures(
            "separation-minimality",
            &not_minimal,
            format!("{minimality_cases} cases with h > 1 captured at radius 1/(h-1)"),
        ),
        Check::from_failures("combined-dominates", &weak, format!("{:?} mode", profile.mode)),
    ])
}

/// Visits terms `0..end` in chunks.
fn for_each_term(s: &dyn DivergingSequence, end: u64, mut f: impl FnMut(u64, &Rational)) -> Result<()> {
    const CHUNK: u64 = 1 << 14;
    let mut start = 0;
    while start < end {
        let stop = (start + CHUNK).min(end);
        for (k, t) in s.terms_range(start, stop)?.iter().enumerate() {
            f(start + k as u64, t);
        }
        start = stop;
    }
    Ok(())
}

/// Membership for a stream of points: a forward pointer over the sorted
/// components while points increase, a binary search otherwise.
struct MergeScan<'a> {
    set: &'a OpenSet,
    next: usize,
    last: Option<Rational>,
}

impl<'a> MergeScan<'a> {
    fn new(set: &'a OpenSet) -> Self {
        MergeScan { set, next: 0, last: None }
    }

    fn member(&mut self, x: &Rational) -> bool {
        if self.last.as_ref().is_some_and(|l| l > x) {
            self.next = 0;
            self.last = None;
            return self.set.member(x);
        }
        self.last = Some(x.clone());
        let comps = self.set.components();
        let ends_before = |hi: &Endpoint| match hi {
            Endpoint::Finite(h) => h <= x,
            Endpoint::NegInf => true,
            Endpoint::PosInf => false,
        };
        while self.next < comps.len() && ends_before(comps[self.next].hi()) {
            self.next += 1;
        }
        comps.get(self.next).is_some_and(|c| c.contains(x))
    }
}

/// Rescans each member's terms against the serialized set, up to
/// `scan_factor` times the index past which terms clear the set.
pub fn verify_certificates(
    family: &SequenceFamily,
    profile: &SeparationProfile,
    set: &AdversarialSet,
    scan_factor: u64,
) -> Result<Vec<Check>> {
    let sup = match set.open_set.components().last().map(|c| c.hi()) {
        Some(Endpoint::Finite(h)) => h.clone(),
        Some(_) => return Ok(vec![Check::new("certificates", false, "adversarial set is unbounded")]),
        None => Rational::zero(),
    };
    let intervals = profile.intervals();
    let mut checks = Vec::new();
    for cert in &set.certificates {
        let member = &family.members()[cert.member];
        let end = (member.divergence_modulus(&sup)? + 1).saturating_mul(scan_factor.max(1));
        let mut found = BTreeSet::new();
        let mut scan = MergeScan::new(&set.open_set);
        for_each_term(member, end, |n, t| {
            if scan.member(t) {
                found.insert(n);
            }
        })?;
        let claimed: BTreeSet<u64> = cert.hits.iter().map(|h| h.n).collect();
        let mut problems = Vec::new();
        if found != claimed {
            problems.push(format!("rescan finds hits {found:?}, certificate lists {claimed:?}"));
        }
        for hit in &cert.hits {
            let iv = intervals.get(hit.interval_index as usize);
            let ok =
                member.term(hit.n)? == hit.term && iv.is_some_and(|iv| iv.contains(&hit.term)) && hit.interval_index < cert.tail.from_index;
            if !ok {
                problems.push(format!("hit n = {} is not in interval {}", hit.n, hit.interval_index));
            }
        }
        for n in cert.tail.from_index..profile.horizon {
            let h = &profile.h_combined[n as usize];
            let ha = BigUint::from(profile.h_per_member[cert.member][n as usize]);
            let ok = match cert.tail.kind {
                Mode::StrongMax => *h >= ha,
                Mode::Diagonal => *h > ha,
            };
            if !ok {
                problems.push(format!("tail claim fails at n = {n}"));
            }
        }
        if cert.mode == Mode::StrongMax && !cert.hits.is_empty() {
            problems.push("strong-mode certificate lists hits".into());
        }
        checks.push(Check::from_failures(
            format!("certificate[{}]", cert.member),
            &problems,
            format!("{} hit(s); rescanned {end} terms", claimed.len()),
        ));
    }
    Ok(checks)
}

/// Nesting and halving of a chain, and that the final point lies in every
/// kept interval.
pub fn verify_chain(chain: &BaireChain) -> Check {
    let mut failures = Vec::new();
    let mut query = chain.start.clone();
    for (t, s) in chain.stages.iter().enumerate() {
        if s.query != query {
            failures.push(format!("stage {t}: query is not the previous kept interval"));
        }
        if !s.kept.is_inside(&s.query) || !s.kept.is_subset_of(&s.refined) || !s.refined.is_inside(&s.query) {
            failures.push(format!("stage {t}: not strictly nested"));
        }
        let halved = s
            .query
            .length()
            .is_some_and(|w| s.kept.width() * Rational::from_integer(2.into()) <= w);
        if !halved {
            failures.push(format!("stage {t}: width not halved"));
        }
        if !s.kept.contains(&chain.final_point) {
            failures.push(format!("stage {t}: final point outside"));
        }
        query = s.kept.interior();
    }
    if chain.stages.is_empty() && chain.start.midpoint().as_ref() != Some(&chain.final_point) {
        failures.push("empty chain must end at the start midpoint".into());
    }
    Check::from_failures("chain", &failures, format!("{} stage(s)", chain.stages.len()))
}

pub fn verify_theorem3(set: &PatternSet, w: &Theorem3Witness) -> Vec<Check> {
    let mut failures = Vec::new();
    let mut prev: Option<&BigUint> = None;
    if w.hits.len() != w.chain.stages.len() {
        failures.push("hit count differs from stage count".to_string());
    }
    for (hit, stage) in w.hits.iter().zip(&w.chain.stages) {
        if !matches!(&stage.meta, OracleMeta::Scaled { k, .. } if *k == hit.k) {
            failures.push(format!("k = {} disagrees with the chain", hit.k));
        }
        if prev.is_some_and(|p| *p >= hit.k) {
            failures.push(format!("k = {} does not increase", hit.k));
        }
        prev = Some(&hit.k);
        let qv = &w.x / from_biguint(&hit.k);
        if qv != hit.quotient || !set.member(&qv) {
            failures.push(format!("x/{} = {} not in the set", hit.k, format_rational(&qv)));
        }
    }
    vec![
        verify_chain(&w.chain),
        Check::new("final-point", w.chain.final_point == w.x, "x is the chain's final point"),
        Check::from_failures("scaled-hits", &failures, format!("{} distinct k with x/k in the set", w.hits.len())),
    ]
}

pub fn verify_remark(set: &PatternSet, seq: &dyn DivergingSequence, w: &RemarkWitness) -> Result<Vec<Check>> {
    let mut failures = Vec::new();
    let mut prev: Option<u64> = None;
    for hit in &w.hits {
        if prev.is_some_and(|p| p >= hit.n) {
            failures.push(format!("n = {} does not increase", hit.n));
        }
        prev = Some(hit.n);
        let p = &w.r + seq.term(hit.n)?;
        if p != hit.point || !set.member(&p) {
            failures.push(format!("r + s({}) = {} not in the set", hit.n, format_rational(&p)));
        }
    }
    let inside = w.chain.start.contains(&w.r);
    Ok(vec![
        verify_chain(&w.chain),
        Check::new("target", inside, "r lies in the target interval"),
        Check::from_failures(
            "translated-hits",
            &failures,
            format!("{} distinct n with r + s(n) in the set", w.hits.len()),
        ),
    ])
}

/// Terms avoid the set (so the tents, which live inside it, vanish there),
/// and every peak is an interval centre of value 1.
pub fn verify_bump(family: &SequenceFamily, demo: &BumpDemo) -> Result<Vec<Check>> {
    let set = &demo.adversary.open_set;
    let mut hits = Vec::new();
    let mut nonzero = Vec::new();
    for (alpha, member) in family.members().iter().enumerate() {
        let end = demo.zero_checks.get(alpha).map_or(demo.horizon, |c| c.checked_terms);
        for_each_term(member, end, |n, t| {
            if set.member(t) {
                hits.push(format!("member {alpha} term {n} lies in the set"));
            }
            if !demo.f.eval(t).is_zero() {
                nonzero.push(format!("f(term_{alpha}({n})) is not 0"));
            }
        })?;
    }
    let mut peaks = Vec::new();
    for (i, p) in demo.peaks.iter().enumerate() {
        if demo.f.eval(&p.x) != Rational::one() || p.x <= from_u64(p.index) {
            peaks.push(format!("peak {i} at {} is not a unit peak past its index", format_rational(&p.x)));
        }
        if i > 0 && demo.peaks[i - 1].x >= p.x {
            peaks.push(format!("peaks not increasing at {i}"));
        }
    }
    let mut outside = Vec::new();
    for (c, r) in demo.f.centers.iter().zip(&demo.f.radii) {
        // each tent's support must be a subset of the set
        let support = crate::exact::Interval::finite(c - r, c + r)?;
        if !set.covers(&support) {
            outside.push(format!("tent at {} leaves the set", format_rational(c)));
        }
    }
    Ok(vec![
        Check::from_failures("terms-avoid-set", &hits, "no member term in the set"),
        Check::from_failures("f-vanishes-on-terms", &nonzero, "f(term) = 0 for every checked term"),
        Check::from_failures("unit-peaks", &peaks, format!("{} peaks of value 1, increasing", demo.peaks.len())),
        Check::from_failures("support-inside-set", &outside, "every tent is supported inside the set"),
    ])
}

pub fn verify_probe(family: &SequenceFamily, set: &OpenSet, outcome: &ProbeOutcome) -> Result<Check> {
    Ok(match outcome {
        ProbeOutcome::Witness { member, hits } => {
            let seq = family
                .members()
                .get(*member)
                .ok_or_else(|| Error::invalid("witness names a missing member"))?;
            let mut failures = Vec::new();
            for &n in hits {
                if !set.member(&seq.term(n)?) {
                    failures.push(format!("term {n} not in the set"));
                }
            }
            if hits.windows(2).any(|w| w[0] >= w[1]) {
                failures.push("hit indices not increasing".into());
            }
            Check::from_failures("probe-hits", &failures, format!("{} hits re-checked", hits.len()))
        }
        ProbeOutcome::Exhausted { .. } => Check::new("probe-hits", true, "exhausted: nothing to re-check"),
    })
}

/// Terms of the block sequence for `g`, rebuilt by walking the blocks
/// `m, m + 1/(g(m)+1), ..., m + g(m)/(g(m)+1)` one term at a time.
pub fn verify_block_terms(g: &OmegaFunction, terms: &[Rational]) -> Check {
    let mut failures = Vec::new();
    let mut m = 0u64;
    let mut k = 0u64;
    for (n, t) in terms.iter().enumerate() {
        let size = g.eval(m) + 1u32;
        let expect = from_u64(m) + Rational::new(k.into(), size.clone().into());
        if *t != expect {
            failures.push(format!(
                "term {n} is {}, block walk gives {}",
                format_rational(t),
                format_rational(&expect)
            ));
        }
        k += 1;
        if BigUint::from(k) == size {
            m += 1;
            k = 0;
        }
    }
    Check::from_failures("block-terms", &failures, format!("{} terms match the block walk", terms.len()))
}

pub fn verify_wave(set: &PatternSet, variant: &WaveVariant, outcome: &WaveProbeOutcome) -> Check {
    match outcome {
        WaveProbeOutcome::Witness { x, hits } => {
            let mut failures = Vec::new();
            for (n, point) in hits {
                let t = variant.term(*n, x);
                if format_rational(&t) != *point || !set.member(&t) {
                    failures.push(format!("n = {n}: {} not in the set", format_rational(&t)));
                }
            }
            if hits.windows(2).any(|w| w[0].0 >= w[1].0) {
                failures.push("hit indices not increasing".into());
            }
            Check::from_failures("wave-hits", &failures, format!("{} hits re-checked", hits.len()))
        }
        WaveProbeOutcome::Exhausted { .. } => Check::new("wave-hits", true, "exhausted: nothing to re-check"),
    }
}
