mod common;

use common::{alg, basic_solutions, q, small_zoo, zoo, Table};
use effecta::observables::OutcomeSet;
use effecta::rdp::check_rdp;
use effecta::representation::canonical_representation;
use effecta::sharp::{is_sharp, sharp_elements};
use effecta::spectral::{
    coordinate_bounds, extend_state, extension_uniqueness, search_alternative_measures,
    sharp_table, spectral_injectivity, spectral_integral, spectral_measure, transform_spectral,
    PhiTransform, SharpState, SpectralError,
};
use effecta::states::state_polytope;
use effecta::{Exec, Verdict, Q};
use num_traits::{One, Zero};
use std::ops::Bound;

#[test]
fn masses_are_level_sets_of_vertex_values() {
    for (name, m) in zoo() {
        let Ok(rep) = canonical_representation(&m) else {
            continue;
        };
        let poly = state_polytope(&m).unwrap();
        for a in m.elements() {
            let mu = spectral_measure(&rep, a).unwrap();
            let mut levels: Vec<Q> = poly.vertices.iter().map(|v| v.value(a).clone()).collect();
            levels.sort();
            levels.dedup();
            assert_eq!(mu.support, levels, "{name}");
            for (lambda, &mass) in mu.support.iter().zip(&mu.masses) {
                assert!(is_sharp(&m, mass), "{name}");
                for v in &poly.vertices {
                    let inside = v.value(a) == lambda;
                    assert_eq!(
                        v.value(mass),
                        &if inside { Q::one() } else { Q::zero() },
                        "{name}"
                    );
                }
            }
        }
    }
}

#[test]
fn integral_recovers_every_state_value() {
    for (name, m) in zoo() {
        let Ok(rep) = canonical_representation(&m) else {
            continue;
        };
        let poly = state_polytope(&m).unwrap();
        let mut states = poly.vertices.clone();
        states.extend(poly.random_mixtures(10, 7));
        for a in m.elements() {
            let mu = spectral_measure(&rep, a).unwrap();
            for s in &states {
                let direct: Q = mu
                    .support
                    .iter()
                    .zip(&mu.masses)
                    .map(|(l, &b)| l * s.value(b))
                    .sum();
                assert_eq!(&direct, s.value(a), "{name}");
                assert_eq!(
                    &spectral_integral(&rep, a, s).unwrap(),
                    s.value(a),
                    "{name}"
                );
            }
        }
        assert!(spectral_injectivity(&rep).unwrap().holds(), "{name}");
    }
}

#[test]
fn measure_examples() {
    let m = alg("chain(3)");
    let rep = canonical_representation(&m).unwrap();
    let mu = spectral_measure(&rep, m.elem("1").unwrap()).unwrap();
    assert_eq!(mu.support, vec![q(1, 3)]);
    assert_eq!(mu.masses, vec![m.one()]);
    let mu0 = spectral_measure(&rep, m.zero()).unwrap();
    assert_eq!(mu0.support, vec![Q::zero()]);
    assert_eq!(mu0.measure(&m, &OutcomeSet::point(Q::zero())), m.one());
    assert_eq!(mu0.measure(&m, &OutcomeSet::point(Q::one())), m.zero());

    let m = alg("boolean(2)");
    let rep = canonical_representation(&m).unwrap();
    let a = m.elem("10").unwrap();
    let mu = spectral_measure(&rep, a).unwrap();
    assert_eq!(mu.support, vec![Q::zero(), Q::one()]);
    assert_eq!(mu.masses, vec![m.supplement(a), a]);
}

#[test]
fn sharp_table_matches_measures() {
    let sets = [
        OutcomeSet::empty(),
        OutcomeSet::point(Q::one()),
        OutcomeSet::interval(Bound::Included(Q::zero()), Bound::Excluded(q(1, 2))),
        OutcomeSet::reals(),
    ];
    for (name, m) in zoo() {
        let Ok(rep) = canonical_representation(&m) else {
            continue;
        };
        for a in sharp_elements(&m).unwrap().members {
            let expect = [m.zero(), a, m.supplement(a), m.one()];
            for (e, want) in sets.iter().zip(expect) {
                assert_eq!(sharp_table(&rep, a, e).unwrap(), want, "{name}");
            }
        }
    }
    let m = alg("chain(3)");
    let rep = canonical_representation(&m).unwrap();
    let err = sharp_table(&rep, m.elem("1").unwrap(), &OutcomeSet::empty()).unwrap_err();
    assert!(matches!(err, SpectralError::NotSharp(_)));
}

#[test]
fn squaring_breaks_the_chain_integral() {
    let m = alg("chain(3)");
    let rep = canonical_representation(&m).unwrap();
    let a = m.elem("1").unwrap();
    let values: Vec<Q> = (0..=3).map(|k| q(k, 3)).collect();
    let report = transform_spectral(&rep, a, &PhiTransform::square_on(&values)).unwrap();
    assert_eq!(report.transformed.support, vec![q(1, 9)]);
    assert!(report.injective.holds());
    match report.integral {
        Verdict::Fails(w) => {
            assert_eq!(w.integral, q(1, 9));
            assert_eq!(w.value, q(1, 3));
        }
        Verdict::Holds => panic!("1/9 should differ from 1/3"),
    }
    let same = transform_spectral(&rep, a, &PhiTransform::identity_on(&values)).unwrap();
    assert_eq!(same.transformed, spectral_measure(&rep, a).unwrap());
    assert!(same.integral.holds());
}

#[test]
fn endpoint_fixing_keeps_sharp_integrals() {
    let m = alg("boolean(2)");
    let rep = canonical_representation(&m).unwrap();
    let phi = PhiTransform::new(vec![
        (Q::zero(), Q::zero()),
        (q(1, 2), q(1, 5)),
        (Q::one(), Q::one()),
    ])
    .unwrap();
    for a in m.elements() {
        assert!(transform_spectral(&rep, a, &phi).unwrap().integral.holds());
    }
    assert!(PhiTransform::new(vec![(Q::zero(), q(1, 2)), (Q::one(), Q::zero())]).is_err());
}

#[test]
fn extension_examples() {
    let m = alg("chain(3)");
    let rep = canonical_representation(&m).unwrap();
    let sh = sharp_elements(&m).unwrap();
    let forced = SharpState {
        members: sh.members.clone(),
        values: vec![Q::zero(), Q::one()],
    };
    let ext = extend_state(&rep, &forced).unwrap();
    for k in m.elements() {
        assert_eq!(ext.value(k), &q(k.index() as i64, 3));
    }
    assert!(extension_uniqueness(&rep, &forced).unwrap().is_singleton());

    let m = alg("boolean(2)");
    let rep = canonical_representation(&m).unwrap();
    let sh = sharp_elements(&m).unwrap();
    let atoms = sh.atoms(&m);
    let a = m.elem("10").unwrap();
    let weights: Vec<Q> = atoms
        .iter()
        .map(|&at| if at == a { q(1, 4) } else { q(3, 4) })
        .collect();
    let ms = SharpState::from_atom_weights(&m, &sh, &atoms, &weights);
    let ext = extend_state(&rep, &ms).unwrap();
    assert_eq!(ext.value(a), &q(1, 4));
    let bounds = extension_uniqueness(&rep, &ms).unwrap();
    assert!(bounds.is_singleton());
    assert_eq!(bounds.lower, ext.values);

    let bad = SharpState {
        members: sh.members.clone(),
        values: vec![Q::zero(); 4],
    };
    assert!(extend_state(&rep, &bad).is_err());
}

#[test]
fn unconstrained_bounds_match_vertex_extremes() {
    for m in small_zoo() {
        let oracle = basic_solutions(&Table::of(&m));
        let got = coordinate_bounds(&m, &[], Exec::Sequential);
        if oracle.is_empty() {
            assert!(got.is_none());
            continue;
        }
        let b = got.unwrap();
        for e in 0..m.len() {
            let lo = oracle.iter().map(|v| &v[e]).min().unwrap();
            let hi = oracle.iter().map(|v| &v[e]).max().unwrap();
            assert_eq!((&b.lower[e], &b.upper[e]), (lo, hi), "{:?}", m.labels());
        }
    }
    let m = alg("boolean(2)");
    assert!(!coordinate_bounds(&m, &[], Exec::Sequential)
        .unwrap()
        .is_singleton());
}

#[test]
fn vertex_restrictions_extend_uniquely() {
    for (name, m) in zoo() {
        if m.len() > 36 || !check_rdp(&m).holds() {
            continue;
        }
        let rep = canonical_representation(&m).unwrap();
        let sh = sharp_elements(&m).unwrap();
        for v in &state_polytope(&m).unwrap().vertices {
            let ms = SharpState::restrict(&sh, v);
            assert_eq!(&extend_state(&rep, &ms).unwrap(), v, "{name}");
            let b = extension_uniqueness(&rep, &ms).unwrap();
            assert!(b.is_singleton(), "{name}");
            assert_eq!(&b.lower, &v.values, "{name}");
        }
    }
}

#[test]
fn no_alternative_measures_on_small_instances() {
    for spec in ["chain(3)", "boolean(2)", "product(chain(1),chain(2))"] {
        let m = alg(spec);
        let rep = canonical_representation(&m).unwrap();
        let sh = sharp_elements(&m).unwrap();
        let mut values: Vec<Q> = rep
            .tribe()
            .functions()
            .iter()
            .flat_map(|f| f.0.clone())
            .collect();
        values.sort();
        values.dedup();
        for a in m.elements() {
            let r = search_alternative_measures(&rep, &sh, a, &values, 1 << 16);
            assert!(!r.skipped);
            assert_eq!(
                r.solutions,
                vec![spectral_measure(&rep, a).unwrap()],
                "{spec}"
            );
        }
    }
}
