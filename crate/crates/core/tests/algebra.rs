mod common;

use common::{alg, boolean_oracle, rdp_counterexample, refinable, sharp_oracle, zoo, Table};
use effecta::algebra::{validate_effect_algebra, Axiom};
use effecta::mv::{detect_mv, MvAxiom, NotMv};
use effecta::rdp::check_rdp;
use effecta::sharp::sharp_elements;
use effecta::{AlgebraError, Elem, Family, RawTable, Verdict};
use proptest::prelude::*;

#[test]
fn zoo_satisfies_derived_laws() {
    for (name, m) in zoo() {
        let t = Table::of(&m);
        for a in m.elements() {
            assert_eq!(m.supplement(m.supplement(a)), a, "{name}");
            for b in m.elements() {
                if t.leq(a.index(), b.index()) {
                    assert!(m.leq(m.supplement(b), m.supplement(a)), "{name}");
                    let diffs = (0..t.n)
                        .filter(|&c| t.add(a.index(), c) == Some(b.index()))
                        .count();
                    assert_eq!(diffs, 1, "{name}: {} - {}", m.label(b), m.label(a));
                }
            }
        }
    }
}

#[test]
fn rdp_matches_quantifier_oracle() {
    for (name, m) in zoo() {
        let t = Table::of(&m);
        match (check_rdp(&m), rdp_counterexample(&t)) {
            (Verdict::Holds, None) => {}
            (Verdict::Fails(w), Some(_)) => {
                let q = w.instance;
                let quad = [q.a1, q.a2, q.b1, q.b2].map(Elem::index);
                assert!(!refinable(&t, quad), "{name}: reported quadruple refines");
                assert_eq!(t.add(quad[0], quad[1]), t.add(quad[2], quad[3]), "{name}");
            }
            (lib, oracle) => panic!("{name}: library {} vs oracle {:?}", lib.holds(), oracle),
        }
    }
}

#[test]
fn mo2_witness_is_two_complementary_pairs() {
    let m = alg("mo2");
    let w = check_rdp(&m).witness().cloned().expect("MO2 lacks RDP");
    let q = w.instance;
    assert_eq!(m.sum(q.a1, q.a2), Some(m.one()));
    assert_eq!(q.a2, m.supplement(q.a1));
    assert_eq!(q.b2, m.supplement(q.b1));
    assert!(![q.b1, q.b2].contains(&q.a1));
}

#[test]
fn sharp_sets_match_oracle() {
    for (name, m) in zoo() {
        let t = Table::of(&m);
        let expected = sharp_oracle(&t);
        let got = match sharp_elements(&m) {
            Ok(s) => s.members,
            Err(e) => panic!("{name}: {e}"),
        };
        let got: Vec<usize> = got.into_iter().map(Elem::index).collect();
        assert_eq!(got, expected, "{name}");
        if check_rdp(&m).holds() {
            boolean_oracle(&t, &expected).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn sharp_examples() {
    let m = alg("chain(3)");
    let s = sharp_elements(&m).unwrap();
    assert_eq!(s.members, vec![m.zero(), m.one()]);
    assert!(s.boolean_verified);
    let m = alg("mo2");
    assert_eq!(sharp_elements(&m).unwrap().members.len(), 6);
    let m = alg("boolean(3)");
    assert_eq!(sharp_elements(&m).unwrap().members.len(), 8);
}

#[test]
fn mv_on_products_extends_the_partial_sum() {
    for (name, m) in zoo() {
        if !name.starts_with("product")
            && !name.starts_with("chain")
            && !name.starts_with("interval")
        {
            continue;
        }
        let mv = detect_mv(&m).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        for (a, b, c) in m.defined_sums() {
            assert_eq!(mv.oplus(a, b), c, "{name}");
        }
    }
}

#[test]
fn chain_oplus_truncates() {
    let m = alg("chain(3)");
    let mv = detect_mv(&m).unwrap();
    for a in m.elements() {
        for b in m.elements() {
            assert_eq!(mv.oplus(a, b).index(), (a.index() + b.index()).min(3));
        }
    }
}

#[test]
fn mo2_is_not_mv() {
    let m = alg("mo2");
    match detect_mv(&m) {
        Err(NotMv::AxiomsFail(fails)) => {
            assert!(
                fails.iter().any(|(ax, _)| *ax == MvAxiom::Lukasiewicz),
                "{fails:?}"
            );
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_tables_name_the_axiom() {
    // a + 1 = a for a ≠ 0
    let raw = RawTable {
        labels: vec!["0".into(), "a".into(), "1".into()],
        zero: 0,
        one: 2,
        sums: vec![
            [0, 0, 0],
            [0, 1, 1],
            [1, 0, 1],
            [0, 2, 2],
            [2, 0, 2],
            [1, 2, 1],
            [2, 1, 1],
        ],
    };
    match validate_effect_algebra(&raw) {
        Err(AlgebraError::AxiomViolation { axiom, .. }) => assert_eq!(axiom, Axiom::Positivity),
        other => panic!("{other:?}"),
    }
}

#[test]
fn interval_matches_product_of_chains() {
    let a = alg("interval(1,2)");
    let b = alg("product(chain(1),chain(2))");
    assert_eq!(a.len(), 6);
    assert_eq!(Table::of(&a).n, Table::of(&b).n);
    assert_eq!(a.defined_sums().count(), b.defined_sums().count());
}

fn small_family() -> impl Strategy<Value = Family> {
    let leaf = prop_oneof![
        (1u32..=4).prop_map(Family::Chain),
        (1u32..=2).prop_map(Family::Boolean)
    ];
    prop_oneof![
        leaf.clone(),
        prop::collection::vec(leaf.clone(), 2..=3).prop_map(Family::Product),
        prop::collection::vec(leaf, 2..=3).prop_map(Family::HorizontalSum),
    ]
    .prop_filter("size bound", |f| f.size() <= 40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_algebras_round_trip(f in small_family()) {
        let m = effecta::generate(&f, 64).unwrap();
        prop_assert_eq!(m.len(), f.size());
        prop_assert_eq!(validate_effect_algebra(&m.to_raw()).unwrap(), m);
    }

    #[test]
    fn rdp_agrees_with_oracle(f in small_family()) {
        let m = effecta::generate(&f, 64).unwrap();
        let t = Table::of(&m);
        prop_assert_eq!(check_rdp(&m).holds(), rdp_counterexample(&t).is_none());
    }

    #[test]
    fn products_have_rdp(fs in prop::collection::vec((1u32..=3).prop_map(Family::Chain), 1..=3)) {
        let m = effecta::generate(&Family::Product(fs), 64).unwrap();
        prop_assert!(check_rdp(&m).holds());
        prop_assert!(detect_mv(&m).is_ok());
    }
}
