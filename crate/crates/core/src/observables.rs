//! Finite-support observables, the sharp observable `ξ(A) = h(χ_A)` on
//! `B₀(T)`, and smearing kernels.

use std::ops::Bound;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{EffectAlgebra, Elem};
use crate::rational::{fmt_q, Q};
use crate::representation::{FuzzyFn, PointSet, Representation};
use crate::sharp::is_sharp;
use crate::states::{is_state, State};
use crate::Verdict;

/// Observables with more support points than this are rejected by
/// [`smear`], which tabulates one kernel function per subset of the support.
pub const MAX_SUPPORT: usize = 16;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ObservableError {
    #[error("support and values differ in length ({support} vs {values})")]
    LengthMismatch { support: usize, values: usize },
    #[error("an observable needs at least one outcome")]
    EmptySupport,
    #[error("support points must be strictly increasing")]
    NotIncreasing,
    #[error("element index {0} out of range")]
    UnknownElement(usize),
    #[error("the sum of the first {count} values is undefined")]
    SumUndefined { count: usize },
    #[error("the values sum to {sum}, not 1")]
    SumNotOne { sum: String },
    #[error("support of {0} points exceeds the limit of 16")]
    SupportTooLarge(usize),
    #[error("kernel function for outcome set {outcomes:?} is not B0-measurable")]
    NotMeasurable { outcomes: Vec<String> },
    #[error("alternative kernel for outcome set {outcomes:?} does not map to x(E)")]
    NotAKernel { outcomes: Vec<String> },
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("xi maps atom {atom} to a non-sharp element")]
    NotSharp { atom: String },
}

/// A finite union of intervals of ℚ, used as an outcome set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OutcomeSet {
    pieces: Vec<(Bound<Q>, Bound<Q>)>,
}

impl OutcomeSet {
    pub fn empty() -> Self {
        OutcomeSet::default()
    }

    pub fn reals() -> Self {
        OutcomeSet {
            pieces: vec![(Bound::Unbounded, Bound::Unbounded)],
        }
    }

    pub fn point(t: Q) -> Self {
        OutcomeSet {
            pieces: vec![(Bound::Included(t.clone()), Bound::Included(t))],
        }
    }

    pub fn points<I: IntoIterator<Item = Q>>(ts: I) -> Self {
        ts.into_iter().fold(OutcomeSet::empty(), |acc, t| {
            acc.union(OutcomeSet::point(t))
        })
    }

    pub fn interval(lo: Bound<Q>, hi: Bound<Q>) -> Self {
        OutcomeSet {
            pieces: vec![(lo, hi)],
        }
    }

    pub fn union(mut self, other: OutcomeSet) -> Self {
        self.pieces.extend(other.pieces);
        self
    }

    pub fn contains(&self, t: &Q) -> bool {
        self.pieces.iter().any(|(lo, hi)| {
            let above = match lo {
                Bound::Unbounded => true,
                Bound::Included(x) => t >= x,
                Bound::Excluded(x) => t > x,
            };
            let below = match hi {
                Bound::Unbounded => true,
                Bound::Included(x) => t <= x,
                Bound::Excluded(x) => t < x,
            };
            above && below
        })
    }
}

/// `x(E) = Σ {aᵢ : tᵢ ∈ E}` with `t₁ < … < t_k` and `a₁ + … + a_k = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Observable {
    #[serde(serialize_with = "ser_qs")]
    pub support: Vec<Q>,
    pub values: Vec<Elem>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_q))
}

pub fn make_observable(
    m: &EffectAlgebra,
    support: Vec<Q>,
    values: Vec<Elem>,
) -> Result<Observable, ObservableError> {
    if support.len() != values.len() {
        return Err(ObservableError::LengthMismatch {
            support: support.len(),
            values: values.len(),
        });
    }
    if support.is_empty() {
        return Err(ObservableError::EmptySupport);
    }
    if support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ObservableError::NotIncreasing);
    }
    if let Some(e) = values.iter().find(|e| e.index() >= m.len()) {
        return Err(ObservableError::UnknownElement(e.index()));
    }
    let mut acc = m.zero();
    for (i, &v) in values.iter().enumerate() {
        acc = m
            .sum(acc, v)
            .ok_or(ObservableError::SumUndefined { count: i + 1 })?;
    }
    if acc != m.one() {
        return Err(ObservableError::SumNotOne {
            sum: m.label(acc).into(),
        });
    }
    Ok(Observable { support, values })
}

impl Observable {
    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Support indices lying in `e`, as a bit mask.
    pub fn mask_of(&self, e: &OutcomeSet) -> u64 {
        self.support
            .iter()
            .enumerate()
            .filter(|(_, t)| e.contains(t))
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// `x(E)` for `E` given as a mask of support indices. Any sub-sum of a
    /// defined sum is defined.
    pub fn eval_mask(&self, m: &EffectAlgebra, mask: u64) -> Elem {
        m.sum_all(
            (0..self.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.values[i]),
        )
        .expect("sub-sums of an observable are defined")
    }

    pub fn eval(&self, m: &EffectAlgebra, e: &OutcomeSet) -> Elem {
        self.eval_mask(m, self.mask_of(e))
    }

    fn describe(&self, mask: u64) -> Vec<String> {
        (0..self.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| fmt_q(&self.support[i]))
            .collect()
    }
}

/// `ξ(A) = h(χ_A)` on `B₀(T)`, stored on the atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpObservable {
    pub atoms: Vec<PointSet>,
    pub values: Vec<Elem>,
}

impl SharpObservable {
    /// `ξ(A)` for a union of atoms.
    pub fn eval(&self, m: &EffectAlgebra, a: PointSet) -> Option<Elem> {
        m.sum_all(
            self.atoms
                .iter()
                .zip(&self.values)
                .filter(|(at, _)| at.is_subset(a))
                .map(|(_, &v)| v),
        )
    }
}

pub fn sharp_observable(rep: &Representation) -> Result<SharpObservable, ObservableError> {
    let m = rep.target();
    let n = rep.carrier_len();
    let atoms = rep.b0().atoms.clone();
    let mut values = vec![];
    for &a in &atoms {
        let v =
            rep.apply(&FuzzyFn::characteristic(n, a))
                .ok_or_else(|| ObservableError::NotSharp {
                    atom: a.describe(rep.tribe().carrier()),
                })?;
        if !is_sharp(m, v) {
            return Err(ObservableError::NotSharp {
                atom: a.describe(rep.tribe().carrier()),
            });
        }
        values.push(v);
    }
    match m.sum_all(values.iter().copied()) {
        Some(s) if s == m.one() => Ok(SharpObservable { atoms, values }),
        _ => Err(ObservableError::SumNotOne {
            sum: "undefined or not 1".into(),
        }),
    }
}

/// Checks `ξ(A ∪ B) = ξ(A) + ξ(B)` for all disjoint `A, B ∈ B₀(T)`, with `ξ`
/// computed directly as `h(χ_A)`.
pub fn check_sharp_additivity(rep: &Representation) -> Verdict<(PointSet, PointSet)> {
    let n = rep.carrier_len();
    let xi = |a: PointSet| rep.apply(&FuzzyFn::characteristic(n, a));
    let sets = &rep.b0().sets;
    for &a in sets {
        for &b in sets {
            if !a.intersection(b).is_empty() {
                continue;
            }
            let sum = xi(a).zip(xi(b)).and_then(|(x, y)| rep.target().sum(x, y));
            if sum.is_none() || sum != xi(a.union(b)) {
                return Verdict::Fails((a, b));
            }
        }
    }
    Verdict::Holds
}

/// One function `f_E ∈ T` with `h(f_E) = x(E)` per subset `E` of the
/// support, indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmearingKernel {
    pub observable: Observable,
    pub functions: Vec<FuzzyFn>,
}

impl SmearingKernel {
    pub fn function(&self, e: &OutcomeSet) -> &FuzzyFn {
        &self.functions[self.observable.mask_of(e) as usize]
    }
}

/// Takes `f_E` to be the representative of `x(E)`; each must be constant on
/// the atoms of `B₀(T)`.
pub fn smear(rep: &Representation, x: &Observable) -> Result<SmearingKernel, ObservableError> {
    if x.len() > MAX_SUPPORT {
        return Err(ObservableError::SupportTooLarge(x.len()));
    }
    let m = rep.target();
    let mut functions = vec![];
    for mask in 0..1u64 << x.len() {
        let f = rep.representative(x.eval_mask(m, mask));
        if !rep.measurable(f) {
            return Err(ObservableError::NotMeasurable {
                outcomes: x.describe(mask),
            });
        }
        functions.push(f.clone());
    }
    Ok(SmearingKernel {
        observable: x.clone(),
        functions,
    })
}

/// `∫_Ω f dm∘ξ` as the finite sum `Σ_A f(A) · m(ξ(A))` over atoms `A`.
fn integral(xi: &SharpObservable, f: &FuzzyFn, m: &State) -> Option<Q> {
    let mut acc = Q::zero();
    for (&a, &v) in xi.atoms.iter().zip(&xi.values) {
        if !f.is_constant_on(a) {
            return None;
        }
        let Some(w) = a.points().next() else { continue };
        acc += &f.0[w] * m.value(v);
    }
    Some(acc)
}

/// Residuals `m(x(E)) − Σ_A f_E(A)·m(ξ(A))`, one per support subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmearingResiduals {
    pub residuals: Vec<Q>,
}

impl SmearingResiduals {
    pub fn holds(&self) -> bool {
        self.residuals.iter().all(Zero::is_zero)
    }

    /// First nonzero residual with its support mask.
    pub fn first_nonzero(&self) -> Option<(u64, &Q)> {
        self.residuals
            .iter()
            .enumerate()
            .find(|(_, r)| !r.is_zero())
            .map(|(i, r)| (i as u64, r))
    }
}

pub fn verify_smearing(
    rep: &Representation,
    x: &Observable,
    kernel: &SmearingKernel,
    m: &State,
) -> Result<SmearingResiduals, ObservableError> {
    is_state(rep.target(), &m.values).map_err(|v| ObservableError::NotAState(v.to_string()))?;
    residuals_for(rep.target(), &sharp_observable(rep)?, x, kernel, m)
}

/// Checks many observables against a fixed list of states, validating the
/// states and building `ξ` once.
pub struct SmearingVerifier<'a> {
    rep: &'a Representation,
    xi: SharpObservable,
    states: Vec<State>,
}

impl<'a> SmearingVerifier<'a> {
    pub fn new(rep: &'a Representation, states: Vec<State>) -> Result<Self, ObservableError> {
        for s in &states {
            is_state(rep.target(), &s.values)
                .map_err(|v| ObservableError::NotAState(v.to_string()))?;
        }
        Ok(SmearingVerifier {
            rep,
            xi: sharp_observable(rep)?,
            states,
        })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Residuals for every state, in state order.
    pub fn verify(
        &self,
        x: &Observable,
        kernel: &SmearingKernel,
    ) -> Result<Vec<SmearingResiduals>, ObservableError> {
        self.states
            .iter()
            .map(|s| residuals_for(self.rep.target(), &self.xi, x, kernel, s))
            .collect()
    }
}

fn residuals_for(
    alg: &EffectAlgebra,
    xi: &SharpObservable,
    x: &Observable,
    kernel: &SmearingKernel,
    m: &State,
) -> Result<SmearingResiduals, ObservableError> {
    let mut residuals = vec![];
    for (mask, f) in kernel.functions.iter().enumerate() {
        let lhs = m.value(x.eval_mask(alg, mask as u64)).clone();
        let rhs = integral(xi, f, m).ok_or_else(|| ObservableError::NotMeasurable {
            outcomes: x.describe(mask as u64),
        })?;
        residuals.push(lhs - rhs);
    }
    Ok(SmearingResiduals { residuals })
}

/// Each alternative kernel must satisfy `h(f_E) = x(E)`; returns whether
/// every alternative gives the same integrals as `kernel`.
pub fn kernel_independence_check(
    rep: &Representation,
    x: &Observable,
    m: &State,
    kernel: &SmearingKernel,
    alternatives: &[Vec<FuzzyFn>],
) -> Result<bool, ObservableError> {
    let alg = rep.target();
    let xi = sharp_observable(rep)?;
    let integrals = |fs: &[FuzzyFn]| -> Result<Vec<Q>, ObservableError> {
        fs.iter()
            .enumerate()
            .map(|(mask, f)| {
                let outcomes = || x.describe(mask as u64);
                if rep.apply(f) != Some(x.eval_mask(alg, mask as u64)) {
                    return Err(ObservableError::NotAKernel {
                        outcomes: outcomes(),
                    });
                }
                integral(&xi, f, m).ok_or_else(|| ObservableError::NotMeasurable {
                    outcomes: outcomes(),
                })
            })
            .collect()
    };
    let base = integrals(&kernel.functions)?;
    for alt in alternatives {
        if alt.len() != kernel.functions.len() {
            return Err(ObservableError::NotAKernel { outcomes: vec![] });
        }
        if integrals(alt)? != base {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::representation::canonical_representation;
    use crate::states::state_polytope;
    use crate::zoo::{generate, Family};

    fn alg(f: Family) -> EffectAlgebra {
        generate(&f, 64).unwrap()
    }

    #[test]
    fn observable_validation() {
        let c3 = alg(Family::Chain(3));
        let e = |s: &str| c3.elem(s).unwrap();
        assert!(make_observable(&c3, vec![qi(1)], vec![c3.one()]).is_ok());
        assert!(make_observable(&c3, vec![qi(0), qi(1)], vec![e("2"), e("1")]).is_ok());
        assert_eq!(
            make_observable(&c3, vec![qi(0), qi(1)], vec![e("2"), e("2")]),
            Err(ObservableError::SumUndefined { count: 2 })
        );
        assert_eq!(
            make_observable(&c3, vec![qi(0), qi(1)], vec![e("1"), e("1")]),
            Err(ObservableError::SumNotOne { sum: "2".into() })
        );
        assert_eq!(
            make_observable(&c3, vec![qi(1), qi(0)], vec![e("2"), e("1")]),
            Err(ObservableError::NotIncreasing)
        );
        let b2 = alg(Family::Boolean(2));
        let a = b2.elem("10").unwrap();
        assert_eq!(
            make_observable(&b2, vec![qi(0), qi(1)], vec![a, a]),
            Err(ObservableError::SumUndefined { count: 2 })
        );
    }

    #[test]
    fn outcome_sets() {
        let e = OutcomeSet::interval(Bound::Included(qi(0)), Bound::Excluded(q(1, 2)));
        assert!(e.contains(&qi(0)));
        assert!(!e.contains(&q(1, 2)));
        assert!(OutcomeSet::reals().contains(&qi(-7)));
        assert!(!OutcomeSet::empty().contains(&qi(0)));
        assert!(OutcomeSet::points([qi(0), qi(1)]).contains(&qi(1)));
    }

    #[test]
    fn chain_smearing() {
        let m = alg(Family::Chain(3));
        let rep = canonical_representation(&m).unwrap();
        let x = make_observable(
            &m,
            vec![qi(0), qi(1)],
            vec![m.elem("2").unwrap(), m.elem("1").unwrap()],
        )
        .unwrap();
        let k = smear(&rep, &x).unwrap();
        assert_eq!(k.function(&OutcomeSet::point(qi(0))).0, vec![q(2, 3)]);
        assert_eq!(k.function(&OutcomeSet::point(qi(1))).0, vec![q(1, 3)]);
        let s = &state_polytope(&m).unwrap().vertices[0];
        let r = verify_smearing(&rep, &x, &k, s).unwrap();
        assert!(r.holds());
        assert_eq!(r.residuals.len(), 4);
    }

    #[test]
    fn boolean_sharp_smearing() {
        let m = alg(Family::Boolean(2));
        let rep = canonical_representation(&m).unwrap();
        let (a, b) = (m.elem("10").unwrap(), m.elem("01").unwrap());
        let x = make_observable(&m, vec![qi(0), qi(1)], vec![b, a]).unwrap();
        let k = smear(&rep, &x).unwrap();
        // â = (0,1): the vertex where s(a) = 1 is s1
        assert_eq!(
            k.function(&OutcomeSet::point(qi(1))),
            &FuzzyFn::characteristic(2, PointSet::singleton(1))
        );
        let poly = state_polytope(&m).unwrap();
        let mid = poly.mixture(&[q(1, 2), q(1, 2)]);
        let r = verify_smearing(&rep, &x, &k, &mid).unwrap();
        assert!(r.holds());
        let xi = sharp_observable(&rep).unwrap();
        assert_eq!(xi.values, vec![b, a]);
        assert!(check_sharp_additivity(&rep).holds());
    }

    #[test]
    fn wrong_kernel_rejected() {
        let m = alg(Family::Boolean(2));
        let rep = canonical_representation(&m).unwrap();
        let x = make_observable(&m, vec![qi(1)], vec![m.one()]).unwrap();
        let k = smear(&rep, &x).unwrap();
        let s = &state_polytope(&m).unwrap().vertices[0];
        assert_eq!(
            kernel_independence_check(&rep, &x, s, &k, std::slice::from_ref(&k.functions)),
            Ok(true)
        );
        let swapped: Vec<FuzzyFn> = k.functions.iter().rev().cloned().collect();
        assert!(matches!(
            kernel_independence_check(&rep, &x, s, &k, &[swapped]),
            Err(ObservableError::NotAKernel { .. })
        ));
    }
}
