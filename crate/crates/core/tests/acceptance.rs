//! End-to-end acceptance run: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use divseq::adversary::{run_adversary, AdversarialSet, Mode, SeparationProfile};
use divseq::category::{bump_transfer_demo, remark_witness, theorem3_witness};
use divseq::exact::q;
use divseq::omega::diagonal_dominator;
use divseq::sequence::{condition_c_probe, coverage_covers, coverage_functional, make_generator, theorem2_sequence};
use divseq::verify::{
    brute_coverage, brute_covered, verify_bump, verify_certificates, verify_profile, verify_remark, verify_theorem3, Check,
};
use divseq::{Endpoint, Interval, OmegaFunction, OpenSet, Rational, SequenceFamily, SequenceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn failed(checks: &[Check]) -> Option<String> {
    checks.iter().find(|c| !c.passed).map(|c| format!("{}: {}", c.check, c.detail))
}

fn diagonal_domination() -> Outcome {
    let mut rng = rng(1);
    let mut pairs = 0u64;
    let mut violations = 0u64;
    for _ in 0..100 {
        let size = rng.gen_range(1..=50);
        let family: Vec<OmegaFunction> = (0..size).map(|_| common::formula(&mut rng)).collect();
        let g = diagonal_dominator(&family).map_err(|e| e.to_string())?.tabulate(1000);
        for (j, f) in family.iter().enumerate() {
            let OmegaFunction::Formula(formula) = f else { unreachable!() };
            let table = common::naive_table(formula, 1000);
            for n in j..1000 {
                pairs += 1;
                if g[n] <= table[n] {
                    violations += 1;
                }
            }
        }
    }
    if violations == 0 {
        Ok(format!("100 families, {pairs} pairs (j <= n < 1000), 0 violations"))
    } else {
        Err(format!("{violations} violations among {pairs} pairs"))
    }
}

struct StrongRun {
    family: SequenceFamily,
    profile: SeparationProfile,
    set: AdversarialSet,
}

fn strong_runs() -> Result<Vec<StrongRun>, String> {
    let mut rng = rng(2);
    let families = (0..25)
        .map(|_| {
            let size = rng.gen_range(1..=8);
            let specs: Vec<SequenceSpec> = (0..size).map(|_| common::member_spec(&mut rng)).collect();
            SequenceFamily::from_specs(&specs).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    families
        .into_par_iter()
        .map(|family| {
            let (profile, set) = run_adversary(&family, Mode::StrongMax, 256).map_err(|e| e.to_string())?;
            Ok(StrongRun { family, profile, set })
        })
        .collect()
}

fn strong_mode_vacuity(runs: &[StrongRun]) -> Outcome {
    let members = runs
        .par_iter()
        .map(|run| {
            if let Some(c) = run.set.certificates.iter().find(|c| !c.hits.is_empty()) {
                return Err(format!("member {} certificate lists {} hits", c.member, c.hits.len()));
            }
            let checks = verify_certificates(&run.family, &run.profile, &run.set, 10).map_err(|e| e.to_string())?;
            match failed(&checks) {
                Some(f) => Err(f),
                None => Ok(run.set.certificates.len()),
            }
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .sum::<usize>();
    Ok(format!(
        "25 families, {members} zero-hit certificates, rescans up to 10x modulus agree"
    ))
}

fn minimality(runs: &[StrongRun]) -> Outcome {
    runs.par_iter()
        .map(|run| {
            let checks = verify_profile(&run.family, &run.profile).map_err(|e| e.to_string())?;
            failed(&checks).map_or(Ok(()), Err)
        })
        .collect::<Result<Vec<()>, String>>()?;
    let cases: usize = runs
        .iter()
        .map(|r| r.profile.h_per_member.iter().flatten().filter(|&&h| h > 1).count())
        .sum();
    Ok(format!("{cases} values h > 1, each captured at radius 1/(h-1) and clear at 1/h"))
}

fn coverage_linkage() -> Outcome {
    let s = theorem2_sequence(OmegaFunction::linear(1, 0)).map_err(|e| e.to_string())?;
    for i in 0..=100u64 {
        let f = coverage_functional(&s, i).map_err(|e| e.to_string())?;
        if f < i {
            return Err(format!("coverage({i}) = {f} < g({i})"));
        }
        let brute = brute_coverage(&s, i, f + 2, 64).map_err(|e| e.to_string())?;
        if brute != f {
            return Err(format!("coverage({i}) = {f}, sweep gives {brute}"));
        }
    }
    Ok("g(m) = m: coverage(i) >= i for i <= 100, equal to the sweep oracle".into())
}

fn scaled_union_witnesses() -> Outcome {
    let mut rng = rng(5);
    for run in 0..10 {
        let set = common::clustered_set(&mut rng);
        let p = common::rational(&mut rng, 1, 10, 4) + q(1, 8);
        let w = q(rng.gen_range(2..=16), 8);
        let start = Interval::finite(p.clone(), p + w).map_err(|e| e.to_string())?;
        let witness = theorem3_witness(&set, 25, &start).map_err(|e| format!("set {run}: {e}"))?;
        let mut ks: Vec<_> = witness.hits.iter().map(|h| h.k.clone()).collect();
        ks.dedup();
        if ks.len() != 25 {
            return Err(format!("set {run}: {} distinct k", ks.len()));
        }
        if let Some(f) = failed(&verify_theorem3(&set, &witness)) {
            return Err(format!("set {run}: {f}"));
        }
    }
    Ok("10 clustered sets, depth 25: 25 distinct k each, every x/k a member, widths halve".into())
}

fn translation_witnesses() -> Outcome {
    let mut rng = rng(6);
    let s = theorem2_sequence(OmegaFunction::linear(1, 0)).map_err(|e| e.to_string())?;
    let mut last_index = 0;
    for run in 0..10 {
        let set = common::unbounded_set(&mut rng);
        let c = common::rational(&mut rng, -5, 5, 4);
        let target = Interval::finite(c.clone(), c + q(1, 2)).map_err(|e| e.to_string())?;
        let w = remark_witness(&set, &s, &target, 20).map_err(|e| format!("set {run}: {e}"))?;
        if w.hits.len() != 20 {
            return Err(format!("set {run}: {} hits", w.hits.len()));
        }
        let checks = verify_remark(&set, &s, &w).map_err(|e| e.to_string())?;
        if let Some(f) = failed(&checks) {
            return Err(format!("set {run}: {f}"));
        }
        last_index = last_index.max(w.hits.last().map_or(0, |h| h.n));
    }
    Ok(format!(
        "10 sets, K = 20 exact hits each at increasing indices (largest index {last_index})"
    ))
}

fn mixed_family() -> SequenceFamily {
    SequenceFamily::from_specs(&[
        SequenceSpec::Theorem2 {
            g: OmegaFunction::linear(1, 0),
        },
        SequenceSpec::Arith {
            step: q(1, 3),
            offset: q(1, 5),
        },
        SequenceSpec::Frac { x: q(2, 7) },
    ])
    .expect("valid family")
}

fn bump_demo() -> Outcome {
    let family = mixed_family();
    let demo = bump_transfer_demo(&family, 512).map_err(|e| e.to_string())?;
    let checks = verify_bump(&family, &demo).map_err(|e| e.to_string())?;
    if !demo.passed() {
        return Err("demo report flags a failure".into());
    }
    if let Some(f) = failed(&checks) {
        return Err(f);
    }
    if demo.zero_checks.iter().any(|c| c.checked_terms < 512) {
        return Err("fewer than 512 terms checked".into());
    }
    let top = &demo.peaks.last().expect("peaks").x;
    Ok(format!(
        "3 members, f(term) = 0 for {} terms, {} unit peaks up to {}",
        demo.zero_checks.iter().map(|c| c.checked_terms).sum::<u64>(),
        demo.peaks.len(),
        divseq::exact::format_rational(top)
    ))
}

fn coverage_generators() -> Vec<SequenceSpec> {
    let arith = |s: Rational, o: Rational| SequenceSpec::Arith { step: s, offset: o };
    let t2 = |g: OmegaFunction| SequenceSpec::Theorem2 { g };
    vec![
        arith(q(1, 1), q(0, 1)),
        arith(q(1, 3), q(0, 1)),
        arith(q(2, 5), q(1, 7)),
        arith(q(3, 2), q(-1, 1)),
        t2(OmegaFunction::linear(1, 0)),
        t2(OmegaFunction::constant(2)),
        t2(OmegaFunction::linear(2, 1)),
        t2(OmegaFunction::from_u64s(&[0, 1, 1, 3]).expect("prefix")),
        SequenceSpec::Translate {
            base: Box::new(t2(OmegaFunction::linear(1, 0))),
            r: q(-5, 3),
        },
        SequenceSpec::Frac { x: q(3, 7) },
        SequenceSpec::Wave { x: q(1, 5), shape: None },
    ]
}

fn oracle_equivalence() -> Outcome {
    let mut coverage_cases = 0u64;
    for spec in coverage_generators() {
        let s = make_generator(&spec).map_err(|e| e.to_string())?;
        for i in 0..=50i64 {
            for j in 1..=100i64 {
                let (iq, r) = (q(i, 1), q(1, j));
                let fast = coverage_covers(&s, &iq, &r).map_err(|e| e.to_string())?;
                let brute = brute_covered(&s, &iq, &r, 64).map_err(|e| e.to_string())?;
                if fast != brute {
                    return Err(format!("{spec:?}: i = {i}, j = {j}: criterion {fast}, sweep {brute}"));
                }
                coverage_cases += 1;
            }
        }
    }
    let mut rng = rng(8);
    for case in 0..10_000 {
        let count = rng.gen_range(0..10);
        let raw = common::naive_set(&mut rng, count);
        let set = OpenSet::normalize(raw.0.clone()).map_err(|e| e.to_string())?;
        if !common::is_normal(&set) || !common::same_set(&set, &raw) {
            return Err(format!("normalize case {case}"));
        }
        for _ in 0..4 {
            let x = common::rational(&mut rng, -12, 16, 12);
            if set.member(&x) != raw.member(&x) {
                return Err(format!("member case {case}"));
            }
        }
        let mut k = common::rational(&mut rng, -3, 3, 5);
        if k == q(0, 1) {
            k = q(1, 2);
        }
        let c = common::rational(&mut rng, -4, 4, 5);
        let image = set.affine_image(&k, &c).map_err(|e| e.to_string())?;
        if !common::is_normal(&image) || !common::same_set(&image, &raw.affine(&k, &c)) {
            return Err(format!("affine case {case}"));
        }
    }
    Ok(format!(
        "{coverage_cases} coverage cases over 11 generators; 10000 normalize/member/affine cases"
    ))
}

fn single_thread<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool").install(f)
}

type Construction = Box<dyn Fn() -> Outcome + Sync>;

fn determinism() -> Outcome {
    let runs: Vec<(&str, Construction)> = vec![
        (
            "dominator",
            Box::new(|| {
                let mut rng = rng(9);
                let fam: Vec<_> = (0..20).map(|_| common::formula(&mut rng)).collect();
                let g = diagonal_dominator(&fam).map_err(|e| e.to_string())?;
                Ok(serde_json::to_string(&g.tabulate(200).iter().map(|v| v.to_string()).collect::<Vec<_>>()).unwrap())
            }),
        ),
        (
            "adversary",
            Box::new(|| {
                let fam = mixed_family();
                let mut out = String::new();
                for mode in [Mode::StrongMax, Mode::Diagonal] {
                    let (profile, set) = run_adversary(&fam, mode, 128).map_err(|e| e.to_string())?;
                    out += &serde_json::to_string(&profile).unwrap();
                    out += &serde_json::to_string(&set).unwrap();
                }
                Ok(out)
            }),
        ),
        (
            "scaled-union",
            Box::new(|| {
                let set = common::clustered_set(&mut rng(10));
                let w = theorem3_witness(&set, 25, &Interval::finite(q(1, 1), q(2, 1)).unwrap()).map_err(|e| e.to_string())?;
                Ok(serde_json::to_string(&w).unwrap())
            }),
        ),
        (
            "translation",
            Box::new(|| {
                let set = common::unbounded_set(&mut rng(11));
                let s = theorem2_sequence(OmegaFunction::linear(1, 0)).map_err(|e| e.to_string())?;
                let w = remark_witness(&set, &s, &Interval::finite(q(0, 1), q(1, 2)).unwrap(), 20).map_err(|e| e.to_string())?;
                Ok(serde_json::to_string(&w).unwrap())
            }),
        ),
        (
            "bump",
            Box::new(|| Ok(serde_json::to_string(&bump_transfer_demo(&mixed_family(), 256).map_err(|e| e.to_string())?).unwrap())),
        ),
        (
            "coverage+probe",
            Box::new(|| {
                let s = theorem2_sequence(OmegaFunction::linear(1, 0)).map_err(|e| e.to_string())?;
                let cov: Vec<u64> = (0..40)
                    .map(|i| coverage_functional(&s, i))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                let set = OpenSet::normalize([
                    (Endpoint::Finite(q(1, 4)), Endpoint::Finite(q(1, 3))),
                    (Endpoint::Finite(q(7, 2)), Endpoint::Finite(q(4, 1))),
                    (Endpoint::Finite(q(9, 1)), Endpoint::PosInf),
                ])
                .unwrap();
                let probe = condition_c_probe(&mixed_family(), &set, 5, 200).map_err(|e| e.to_string())?;
                Ok(format!("{cov:?}{}", serde_json::to_string(&probe).unwrap()))
            }),
        ),
    ];
    for (name, run) in &runs {
        let a = run()?;
        let b = run()?;
        let c = single_thread(run)?;
        if a != b || a != c {
            return Err(format!("{name}: reruns differ"));
        }
    }
    Ok(format!(
        "{} constructions rerun (parallel twice, single-threaded once): byte-identical",
        runs.len()
    ))
}

/// Runs every criterion, or only the ids given as arguments
/// (`cargo test --test acceptance -- 2 8`).
fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all_ok = true;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        if !wanted.is_empty() && !wanted.contains(&id) {
            return;
        }
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                all_ok = false;
                println!("criterion {id} FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    };
    report(1, "diagonal domination", &mut diagonal_domination);
    let mut runs = Err("adversary runs were not built".to_string());
    report(2, "strong-mode zero hits", &mut || {
        runs = strong_runs();
        strong_mode_vacuity(runs.as_deref().map_err(|e| e.clone())?)
    });
    report(3, "separation minimality", &mut || {
        if runs.is_err() {
            runs = strong_runs();
        }
        minimality(runs.as_deref().map_err(|e| e.clone())?)
    });
    report(4, "coverage of the block sequence", &mut coverage_linkage);
    report(5, "scaled-union witnesses", &mut scaled_union_witnesses);
    report(6, "translation witnesses", &mut translation_witnesses);
    report(7, "bump transfer demo", &mut bump_demo);
    report(8, "oracle equivalence", &mut oracle_equivalence);
    report(9, "determinism", &mut determinism);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
