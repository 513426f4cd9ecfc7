//! States, the state polytope and evaluation functions, all in exact
//! rational arithmetic.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{EffectAlgebra, Elem};
use crate::linalg::{rank, solve_affine, Affine};
use crate::par::Exec;
use crate::polytope::{vertices, HalfSpaces, VertexMethod};
use crate::rational::{fmt_q, in_unit_interval, lex_cmp, Q};
use crate::zoo::DEFAULT_MAX_SIZE;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("the algebra admits no state")]
    EmptyStateSpace,
    #[error("size {size} exceeds the configured bound {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
}

/// A state, or a candidate one: one rational per element, by element index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub values: Vec<Q>,
}

impl State {
    pub fn value(&self, a: Elem) -> &Q {
        &self.values[a.index()]
    }
}

/// One row of the H-representation of `S(M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// `s(1) = 1`
    Normalization,
    /// `s(a) + s(b) = s(sum)`, listed once per unordered pair.
    Additivity { a: Elem, b: Elem, sum: Elem },
    /// `0 ≤ s(e) ≤ 1`
    Bounds { e: Elem },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateViolation {
    WrongLength { expected: usize, got: usize },
    OutOfRange { element: Elem },
    Normalization { value: Q },
    Additivity { a: Elem, b: Elem, sum: Elem },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::WrongLength { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            StateViolation::OutOfRange { element } => write!(f, "value at {element} outside [0,1]"),
            StateViolation::Normalization { value } => write!(f, "s(1) = {} != 1", fmt_q(value)),
            StateViolation::Additivity { a, b, sum } => {
                write!(f, "s({a}) + s({b}) != s({sum})")
            }
        }
    }
}

/// Exact check of the two state laws. Range is checked first, then
/// `s(1) = 1`, then additivity in lexicographic order of defined sums.
pub fn is_state(m: &EffectAlgebra, values: &[Q]) -> Result<(), StateViolation> {
    if values.len() != m.len() {
        return Err(StateViolation::WrongLength {
            expected: m.len(),
            got: values.len(),
        });
    }
    if let Some(e) = m.elements().find(|e| !in_unit_interval(&values[e.index()])) {
        return Err(StateViolation::OutOfRange { element: e });
    }
    let one = &values[m.one().index()];
    if !one.is_one() {
        return Err(StateViolation::Normalization { value: one.clone() });
    }
    for (a, b, c) in m.defined_sums() {
        if &values[a.index()] + &values[b.index()] != values[c.index()] {
            return Err(StateViolation::Additivity { a, b, sum: c });
        }
    }
    Ok(())
}

/// On a finite algebra every increasing sequence is eventually constant,
/// so σ-additivity reduces to being a state. Monotonicity along the order
/// is checked as well since it is what continuity from below rests on.
pub fn is_sigma_additive(m: &EffectAlgebra, s: &State) -> bool {
    is_state(m, &s.values).is_ok()
        && m.elements().all(|a| {
            m.elements()
                .all(|b| !m.leq(a, b) || s.value(a) <= s.value(b))
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePolytope {
    pub constraints: Vec<Constraint>,
    /// Extremal states in lexicographic order of their value vectors.
    pub vertices: Vec<State>,
    /// Affine dimension of the polytope; `None` when it is empty.
    pub dimension: Option<usize>,
    /// Solution set of the equality constraints, if consistent.
    pub(crate) equalities: Option<Affine>,
}

#[derive(Clone, Copy, Debug)]
pub struct PolytopeOptions {
    pub max_size: usize,
    pub method: VertexMethod,
    pub exec: Exec,
}

impl Default for PolytopeOptions {
    fn default() -> Self {
        PolytopeOptions {
            max_size: DEFAULT_MAX_SIZE,
            method: VertexMethod::Auto,
            exec: Exec::default(),
        }
    }
}

pub(crate) fn equality_system(m: &EffectAlgebra) -> (Vec<Constraint>, Vec<Vec<Q>>, Vec<Q>) {
    let n = m.len();
    let mut constraints = vec![Constraint::Normalization];
    let mut rows = vec![];
    let mut rhs = vec![];
    let mut r = vec![Q::zero(); n];
    r[m.one().index()] = Q::one();
    rows.push(r);
    rhs.push(Q::one());
    for (a, b, c) in m.defined_sums() {
        if a > b {
            continue;
        }
        constraints.push(Constraint::Additivity { a, b, sum: c });
        let mut r = vec![Q::zero(); n];
        r[a.index()] += Q::one();
        r[b.index()] += Q::one();
        r[c.index()] -= Q::one();
        rows.push(r);
        rhs.push(Q::zero());
    }
    constraints.extend(m.elements().map(|e| Constraint::Bounds { e }));
    (constraints, rows, rhs)
}

/// `0 ≤ x ≤ 1` for `x = particular + Σ tⱼ directions[j]`, as half-spaces in `t`.
pub(crate) fn unit_box(aff: &Affine) -> HalfSpaces {
    let n = aff.particular.len();
    let mut h = HalfSpaces::new(aff.dim());
    for e in 0..n {
        let g: Vec<Q> = aff.directions.iter().map(|d| d[e].clone()).collect();
        h.push(aff.particular[e].clone(), g.clone());
        h.push(
            Q::one() - &aff.particular[e],
            g.into_iter().map(|x| -x).collect(),
        );
    }
    h
}

pub fn state_polytope(m: &EffectAlgebra) -> Result<StatePolytope, StateError> {
    state_polytope_with(m, PolytopeOptions::default())
}

pub fn state_polytope_with(
    m: &EffectAlgebra,
    opts: PolytopeOptions,
) -> Result<StatePolytope, StateError> {
    if m.len() > opts.max_size {
        return Err(StateError::SizeLimitExceeded {
            size: m.len(),
            limit: opts.max_size,
        });
    }
    let (constraints, rows, rhs) = equality_system(m);
    let equalities = solve_affine(&rows, &rhs, m.len());
    let mut verts: Vec<State> = match &equalities {
        None => vec![],
        Some(aff) => vertices(&unit_box(aff), opts.method, opts.exec)
            .into_iter()
            .map(|t| State {
                values: aff.point(&t),
            })
            .collect(),
    };
    verts.sort_by(|a, b| lex_cmp(&a.values, &b.values));
    verts.dedup();
    let dimension = verts.first().map(|v0| {
        let diffs: Vec<Vec<Q>> = verts[1..]
            .iter()
            .map(|v| {
                v.values
                    .iter()
                    .zip(&v0.values)
                    .map(|(x, y)| x - y)
                    .collect()
            })
            .collect();
        rank(&diffs)
    });
    Ok(StatePolytope {
        constraints,
        vertices: verts,
        dimension,
        equalities,
    })
}

/// Restriction of `â` to the extremal states, in vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub element: Elem,
    pub values: Vec<Q>,
}

pub fn evaluate(poly: &StatePolytope, a: Elem) -> Result<Evaluation, StateError> {
    if poly.vertices.is_empty() {
        return Err(StateError::EmptyStateSpace);
    }
    Ok(Evaluation {
        element: a,
        values: poly.vertices.iter().map(|v| v.value(a).clone()).collect(),
    })
}

/// True iff distinct elements have distinct evaluations.
pub fn separating(poly: &StatePolytope) -> bool {
    let Some(first) = poly.vertices.first() else {
        return false;
    };
    let n = first.values.len();
    let mut cols: Vec<Vec<&Q>> = (0..n)
        .map(|e| poly.vertices.iter().map(|v| &v.values[e]).collect())
        .collect();
    cols.sort();
    cols.windows(2).all(|w| w[0] != w[1])
}

impl StatePolytope {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Convex combination of the vertices; weights must sum to 1.
    pub fn mixture(&self, weights: &[Q]) -> State {
        assert_eq!(weights.len(), self.vertices.len());
        let n = self.vertices.first().map_or(0, |v| v.values.len());
        let mut values = vec![Q::zero(); n];
        for (w, v) in weights.iter().zip(&self.vertices) {
            if w.is_zero() {
                continue;
            }
            for (x, y) in values.iter_mut().zip(&v.values) {
                *x += w * y;
            }
        }
        State { values }
    }

    /// `count` mixtures with positive integer weights in `1..=12` drawn from
    /// a ChaCha8 stream, normalized to sum 1.
    pub fn random_mixtures(&self, count: usize, seed: u64) -> Vec<State> {
        if self.vertices.is_empty() {
            return vec![];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let raw: Vec<i64> = (0..self.vertices.len())
                    .map(|_| rng.gen_range(1..=12))
                    .collect();
                let total: i64 = raw.iter().sum();
                let w: Vec<Q> = raw.iter().map(|&x| crate::rational::q(x, total)).collect();
                self.mixture(&w)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::zoo::{generate, Family};

    fn alg(f: Family) -> EffectAlgebra {
        generate(&f, 64).unwrap()
    }

    #[test]
    fn chain_unique_state() {
        let m = alg(Family::Chain(3));
        let p = state_polytope(&m).unwrap();
        assert_eq!(p.vertices.len(), 1);
        assert_eq!(p.vertices[0].values, vec![qi(0), q(1, 3), q(2, 3), qi(1)]);
        assert_eq!(p.dimension, Some(0));
        let e = evaluate(&p, m.elem("1").unwrap()).unwrap();
        assert_eq!(e.values, vec![q(1, 3)]);
        assert!(separating(&p));
    }

    #[test]
    fn mo2_square() {
        let m = alg(Family::mo2());
        let p = state_polytope(&m).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.dimension, Some(2));
        let a = m.elem("0:10").unwrap();
        assert_eq!(
            evaluate(&p, a).unwrap().values,
            vec![qi(0), qi(0), qi(1), qi(1)]
        );
        assert!(separating(&p));
    }

    #[test]
    fn boolean_point_masses() {
        let m = alg(Family::Boolean(2));
        let p = state_polytope(&m).unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert_eq!(p.vertices[0].values, vec![qi(0), qi(0), qi(1), qi(1)]);
        assert_eq!(p.vertices[1].values, vec![qi(0), qi(1), qi(0), qi(1)]);
        assert_eq!(evaluate(&p, m.zero()).unwrap().values, vec![qi(0), qi(0)]);
    }

    #[test]
    fn is_state_witnesses() {
        let m = alg(Family::Chain(3));
        assert!(is_state(&m, &[qi(0), q(1, 3), q(2, 3), qi(1)]).is_ok());
        assert_eq!(
            is_state(&m, &[qi(0), q(1, 4), q(2, 4), q(3, 4)]),
            Err(StateViolation::Normalization { value: q(3, 4) })
        );
        let b = alg(Family::Boolean(2));
        let ind = [qi(0), qi(0), qi(0), qi(1)];
        assert_eq!(
            is_state(&b, &ind),
            Err(StateViolation::Additivity {
                a: Elem::from_index(1),
                b: Elem::from_index(2),
                sum: b.one()
            })
        );
        assert!(matches!(
            is_state(&m, &[qi(0)]),
            Err(StateViolation::WrongLength { .. })
        ));
        assert!(matches!(
            is_state(&m, &[qi(0), q(4, 3), q(2, 3), qi(1)]),
            Err(StateViolation::OutOfRange { .. })
        ));
    }

    #[test]
    fn stateless_algebra() {
        // s(a) = s(b) = 1/2 is forced, so the single state cannot separate a, b
        let m = alg(Family::HorizontalSum(vec![
            Family::Chain(2),
            Family::Chain(2),
        ]));
        let p = state_polytope(&m).unwrap();
        assert_eq!(p.vertices.len(), 1);
        assert!(!separating(&p));
        let empty = StatePolytope {
            constraints: vec![],
            vertices: vec![],
            dimension: None,
            equalities: None,
        };
        assert!(!separating(&empty));
        assert_eq!(evaluate(&empty, m.zero()), Err(StateError::EmptyStateSpace));
    }

    #[test]
    fn mixtures_are_states() {
        let m = alg(Family::Product(vec![Family::Boolean(2), Family::Chain(2)]));
        let p = state_polytope(&m).unwrap();
        for s in p.random_mixtures(10, 7) {
            assert!(is_state(&m, &s.values).is_ok());
            assert!(is_sigma_additive(&m, &s));
        }
        assert_eq!(p.random_mixtures(3, 1), p.random_mixtures(3, 1));
    }

    #[test]
    fn size_limit() {
        let m = alg(Family::Boolean(4));
        let opts = PolytopeOptions {
            max_size: 8,
            ..Default::default()
        };
        assert_eq!(
            state_polytope_with(&m, opts),
            Err(StateError::SizeLimitExceeded { size: 16, limit: 8 })
        );
    }
}
