mod common;

use common::{is_normal, probe_points, same_set, NaiveSet};
use divseq::category::{baire_chain_with, scaled_union_oracle, translation_dense_oracle, DenseOpenOracle};
use divseq::exact::q;
use divseq::omega::{diagonal_dominator, monotone_envelope};
use divseq::sequence::{coverage_covers, make_generator, terms_in, theorem2_sequence};
use divseq::verify::{brute_covered, verify_chain, verify_dominator, verify_envelope};
use divseq::{DivergingSequence, Endpoint, Interval, OmegaFunction, OpenSet, PatternSet, Rational, SequenceSpec, Tail};
use num_bigint::BigUint;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..7).prop_map(|(n, d)| q(n, d))
}

fn pos_rat() -> impl Strategy<Value = Rational> {
    (1i64..40, 1i64..9).prop_map(|(n, d)| q(n, d))
}

fn endpoint_pair() -> impl Strategy<Value = (Endpoint, Endpoint)> {
    (rat(), pos_rat(), 0u8..12, 0u8..12).prop_map(|(a, w, ia, ib)| {
        let lo = if ia == 0 { Endpoint::NegInf } else { Endpoint::Finite(a.clone()) };
        let hi = if ib == 0 { Endpoint::PosInf } else { Endpoint::Finite(a + w) };
        (lo, hi)
    })
}

fn raw_set() -> impl Strategy<Value = NaiveSet> {
    prop::collection::vec(endpoint_pair(), 0..10).prop_map(NaiveSet)
}

fn monotone_spec() -> impl Strategy<Value = SequenceSpec> {
    prop_oneof![
        (pos_rat(), rat()).prop_map(|(step, offset)| SequenceSpec::Arith { step, offset }),
        (0u64..3, 0u64..4).prop_map(|(a, b)| SequenceSpec::Theorem2 {
            g: OmegaFunction::linear(a, b)
        }),
        (prop::collection::vec(0u64..3, 1..8), rat()).prop_map(|(steps, r)| {
            let mut acc = 0u64;
            let values = steps
                .into_iter()
                .map(|s| {
                    acc += s;
                    BigUint::from(acc)
                })
                .collect();
            SequenceSpec::Translate {
                base: Box::new(SequenceSpec::Theorem2 {
                    g: OmegaFunction::prefix(values).unwrap(),
                }),
                r,
            }
        }),
        (1i64..7, 8i64..15).prop_map(|(n, d)| SequenceSpec::Frac { x: q(n, d) }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_agrees_with_naive_membership(raw in raw_set(), extra in prop::collection::vec(rat(), 0..8)) {
        let set = OpenSet::normalize(raw.0.clone()).unwrap();
        prop_assert!(is_normal(&set));
        prop_assert!(same_set(&set, &raw));
        for x in &extra {
            prop_assert_eq!(set.member(x), raw.member(x));
        }
    }

    #[test]
    fn normalize_is_idempotent(raw in raw_set()) {
        let once = OpenSet::normalize(raw.0).unwrap();
        let pairs: Vec<_> = once.components().iter().map(|c| (c.lo().clone(), c.hi().clone())).collect();
        prop_assert_eq!(OpenSet::normalize(pairs).unwrap(), once);
    }

    #[test]
    fn affine_image_matches_naive_and_round_trips(raw in raw_set(), k in rat(), c in rat()) {
        prop_assume!(k != q(0, 1));
        let set = OpenSet::normalize(raw.0.clone()).unwrap();
        let image = set.affine_image(&k, &c).unwrap();
        prop_assert!(is_normal(&image));
        prop_assert!(same_set(&image, &raw.affine(&k, &c)));
        let back = image.affine_image(&(q(1, 1) / &k), &(-&c / &k)).unwrap();
        prop_assert_eq!(&back, &set);
        let bounded = set.components().iter().all(|i| i.is_bounded());
        if bounded {
            let abs_k = if k < q(0, 1) { -k.clone() } else { k.clone() };
            prop_assert_eq!(image.finite_measure(), set.finite_measure() * abs_k);
        }
    }

    #[test]
    fn json_round_trip_is_exact(raw in raw_set()) {
        let set = OpenSet::normalize(raw.0).unwrap();
        let text = serde_json::to_string(&set).unwrap();
        let back: OpenSet = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn dominator_beats_every_earlier_member(vals in prop::collection::vec(prop::collection::vec(0u64..50, 1..6), 1..6), a in 0u64..4) {
        let mut fs: Vec<OmegaFunction> = vals.iter().map(|v| OmegaFunction::from_u64s(v).unwrap()).collect();
        fs.push(OmegaFunction::linear(a, 1));
        let g = diagonal_dominator(&fs).unwrap().tabulate(40);
        prop_assert!(verify_dominator(&fs, &g).passed);
    }

    #[test]
    fn envelope_is_least_monotone_majorant(v in prop::collection::vec(0u64..30, 1..20)) {
        let f = OmegaFunction::from_u64s(&v).unwrap();
        let e = monotone_envelope(&f);
        let table = e.tabulate(25);
        prop_assert!(verify_envelope(&f, &table).passed);
        prop_assert_eq!(monotone_envelope(&e).tabulate(25), table);
    }

    #[test]
    fn divergence_modulus_is_sound(spec in monotone_spec(), bound in rat()) {
        let s = make_generator(&spec).unwrap();
        let m = s.divergence_modulus(&bound).unwrap();
        for n in m..m + 40 {
            prop_assert!(s.term(n).unwrap() > bound, "term {} at/below bound", n);
        }
    }

    #[test]
    fn terms_in_finds_every_term(spec in monotone_spec(), lo in rat(), w in pos_rat()) {
        let s = make_generator(&spec).unwrap();
        let window = Interval::finite(lo.clone(), &lo + &w).unwrap();
        let got = terms_in(&s, &window).unwrap();
        let end = s.divergence_modulus(&(&lo + &w)).unwrap() + 30;
        let brute: Vec<(u64, Rational)> = (0..end)
            .filter_map(|n| {
                let t = s.term(n).unwrap();
                window.contains(&t).then_some((n, t))
            })
            .collect();
        prop_assert_eq!(got, brute);
    }

    #[test]
    fn coverage_agrees_with_sweep_and_is_monotone_in_radius(spec in monotone_spec(), i in 0u64..12, j in 1u64..30) {
        let s = make_generator(&spec).unwrap();
        let iq = q(i as i64, 1);
        let r = q(1, j as i64);
        let fast = coverage_covers(&s, &iq, &r).unwrap();
        prop_assert_eq!(fast, brute_covered(&s, &iq, &r, 64).unwrap());
        if fast {
            prop_assert!(coverage_covers(&s, &iq, &(&r * q(3, 2))).unwrap());
        }
    }

    #[test]
    fn scaled_oracle_contract(p in pos_rat(), w in pos_rat(), n in 1u64..20, ratio_num in 1i64..4) {
        let cell = OpenSet::normalize([(q(1, 2), q(3, 4))]).unwrap();
        let u = PatternSet::new(OpenSet::empty(), Some(Tail::Geometric { ratio: q(ratio_num, 4), cell })).unwrap();
        let oracle = scaled_union_oracle(&u, BigUint::from(n)).unwrap();
        let query = Interval::finite(p.clone(), &p + &w).unwrap();
        let r = oracle.refine(&query).unwrap();
        prop_assert!(r.interval.is_inside(&query));
        for x in [&r.interval.lo, &r.interval.hi, &r.interval.midpoint()] {
            prop_assert!(oracle.witnesses(x, &r).unwrap());
        }
    }

    #[test]
    fn translation_oracle_contract(a in rat(), w in pos_rat(), t in 0u64..50) {
        let tail = Tail::Power { coeff: q(1, 1), exponent: 2, lo: q(0, 1), hi: q(1, 2), from: 1 };
        let u = PatternSet::new(OpenSet::empty(), Some(tail)).unwrap();
        let s = theorem2_sequence(OmegaFunction::linear(1, 0)).unwrap();
        let oracle = translation_dense_oracle(&u, &s, t).unwrap();
        let query = Interval::finite(a.clone(), &a + &w).unwrap();
        let r = oracle.refine(&query).unwrap();
        prop_assert!(r.interval.is_inside(&query));
        for x in [&r.interval.lo, &r.interval.hi, &r.interval.midpoint()] {
            prop_assert!(oracle.witnesses(x, &r).unwrap());
        }
    }

    #[test]
    fn punctured_chains_nest_and_avoid(points in prop::collection::vec(rat(), 0..8), a in rat(), w in pos_rat()) {
        let start = Interval::finite(a.clone(), &a + &w).unwrap();
        let chain = baire_chain_with(&start, points.len(), |t, _| {
            Ok(Box::new(divseq::category::Punctured { point: points[t].clone() }) as Box<dyn DenseOpenOracle>)
        }).unwrap();
        prop_assert!(verify_chain(&chain).passed);
        for p in &points {
            prop_assert_ne!(&chain.final_point, p);
        }
    }
}

#[test]
fn probe_points_cover_every_gap() {
    let pts = probe_points(vec![q(1, 1), q(0, 1), q(1, 1)]);
    assert_eq!(pts.len(), 5);
}
