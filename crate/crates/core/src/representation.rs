//! Representations `(Ω, T, h)` of an effect algebra by fuzzy functions on a
//! finite carrier, the canonical one built from extremal states, and the
//! σ-algebra `B₀(T)` of sets whose characteristic functions are sharp in `T`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{validate_effect_algebra, EffectAlgebra, Elem, RawTable};
use crate::rational::{fmt_q, in_unit_interval, Q};
use crate::rdp::check_rdp;
use crate::sharp::is_sharp;
use crate::states::{separating, state_polytope, State, StatePolytope};
use crate::Verdict;

/// Carriers are indexed by the bits of a `u64`.
pub const MAX_CARRIER: usize = 64;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("the algebra does not have the Riesz decomposition property")]
    RdpRequired,
    #[error("the algebra admits no state")]
    EmptyStateSpace,
    #[error("extremal states do not separate {a} and {b}")]
    NonSeparatingStates { a: String, b: String },
    #[error("carrier of {0} points exceeds the limit of 64")]
    CarrierTooLarge(usize),
    #[error("not an effect-tribe: {0}")]
    InvalidTribe(String),
    #[error("not a representation: {0}")]
    InvalidRepresentation(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("sandwich function {0} is not in the tribe")]
    SandwichOutsideTribe(String),
    #[error(transparent)]
    State(#[from] crate::states::StateError),
}

/// A subset of a carrier of at most 64 points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        PointSet(1 << i)
    }

    pub fn from_points<I: IntoIterator<Item = usize>>(points: I) -> Self {
        PointSet(points.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, o: Self) -> Self {
        PointSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        PointSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        PointSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn points(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn describe(self, labels: &[String]) -> String {
        let names: Vec<&str> = self.points().map(|i| labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.points())
    }
}

/// A function from the carrier to `[0,1] ∩ ℚ`, by point index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuzzyFn(pub Vec<Q>);

impl FuzzyFn {
    pub fn constant(n: usize, c: Q) -> Self {
        FuzzyFn(vec![c; n])
    }

    pub fn characteristic(n: usize, a: PointSet) -> Self {
        FuzzyFn(
            (0..n)
                .map(|i| if a.contains(i) { Q::one() } else { Q::zero() })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn complement(&self) -> Self {
        FuzzyFn(self.0.iter().map(|x| Q::one() - x).collect())
    }

    fn zip(&self, o: &Self, f: impl Fn(&Q, &Q) -> Q) -> Self {
        FuzzyFn(self.0.iter().zip(&o.0).map(|(x, y)| f(x, y)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x - y)
    }

    pub fn max(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.max(y).clone())
    }

    pub fn min(&self, o: &Self) -> Self {
        self.zip(o, |x, y| x.min(y).clone())
    }

    /// Pointwise order.
    pub fn leq(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(x, y)| x <= y)
    }

    /// `N_{Ω₀}(f)`: the points of `omega0` where `f` does not vanish.
    pub fn support(&self, omega0: PointSet) -> PointSet {
        PointSet::from_points(
            (0..self.len()).filter(|&i| omega0.contains(i) && !self.0[i].is_zero()),
        )
    }

    /// `Some(A)` if this is `χ_A`.
    pub fn as_characteristic(&self) -> Option<PointSet> {
        self.0
            .iter()
            .all(|x| x.is_zero() || x.is_one())
            .then(|| self.support(PointSet::full(self.len())))
    }

    pub fn is_constant_on(&self, a: PointSet) -> bool {
        let mut it = a.points().map(|i| &self.0[i]);
        match it.next() {
            None => true,
            Some(first) => it.all(|x| x == first),
        }
    }
}

impl fmt::Display for FuzzyFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for FuzzyFn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_q))
    }
}

/// `N_{Ω₀}(f)` as a free function.
pub fn support(f: &FuzzyFn, omega0: PointSet) -> PointSet {
    f.support(omega0)
}

/// A finite effect-tribe: contains `1`, closed under `1 − f` and under
/// pointwise sums that stay below `1`. Monotone limits are automatic since a
/// finite set has no strictly increasing infinite chain.
#[derive(Clone, Debug)]
pub struct EffectTribe {
    carrier: Vec<String>,
    functions: Vec<FuzzyFn>,
    index: HashMap<FuzzyFn, usize>,
}

impl PartialEq for EffectTribe {
    fn eq(&self, o: &Self) -> bool {
        self.carrier == o.carrier && self.functions == o.functions
    }
}

impl EffectTribe {
    pub fn new(carrier: Vec<String>, functions: Vec<FuzzyFn>) -> Result<Self, RepresentationError> {
        let bad = |s: String| Err(RepresentationError::InvalidTribe(s));
        let n = carrier.len();
        if n > MAX_CARRIER {
            return Err(RepresentationError::CarrierTooLarge(n));
        }
        let mut index = HashMap::new();
        for (i, f) in functions.iter().enumerate() {
            if f.len() != n {
                return bad(format!(
                    "function {f} has {} values, carrier has {n} points",
                    f.len()
                ));
            }
            if !f.0.iter().all(in_unit_interval) {
                return bad(format!("function {f} leaves [0,1]"));
            }
            if index.insert(f.clone(), i).is_some() {
                return bad(format!("function {f} listed twice"));
            }
        }
        let t = EffectTribe {
            carrier,
            functions,
            index,
        };
        if !t.contains(&FuzzyFn::constant(n, Q::one())) {
            return bad("constant 1 missing".into());
        }
        for f in &t.functions {
            let c = f.complement();
            if !t.contains(&c) {
                return bad(format!("complement {c} of {f} missing"));
            }
        }
        for f in &t.functions {
            for g in &t.functions {
                let s = f.add(g);
                if s.0.iter().all(|x| *x <= Q::one()) && !t.contains(&s) {
                    return bad(format!("sum {s} of {f} and {g} missing"));
                }
            }
        }
        Ok(t)
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn functions(&self) -> &[FuzzyFn] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn index_of(&self, f: &FuzzyFn) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn contains(&self, f: &FuzzyFn) -> bool {
        self.index.contains_key(f)
    }

    /// The tribe as an effect algebra under the pointwise partial sum.
    /// Element `i` is function `i`, labelled by its value tuple.
    pub fn as_algebra(&self) -> EffectAlgebra {
        let n = self.carrier.len();
        let mut sums = vec![];
        for (i, f) in self.functions.iter().enumerate() {
            for (j, g) in self.functions.iter().enumerate() {
                if let Some(k) = self.index_of(&f.add(g)) {
                    sums.push([i, j, k]);
                }
            }
        }
        let raw = RawTable {
            labels: self.functions.iter().map(|f| f.to_string()).collect(),
            zero: self
                .index_of(&FuzzyFn::constant(n, Q::zero()))
                .expect("tribe contains 0"),
            one: self
                .index_of(&FuzzyFn::constant(n, Q::one()))
                .expect("tribe contains 1"),
            sums,
        };
        validate_effect_algebra(&raw).expect("an effect-tribe is an effect algebra")
    }
}

/// `B₀(T)` together with `S₀(T)` and the atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaAlgebraB0 {
    /// `{A : χ_A ∈ T and χ_A sharp in T}`, sorted.
    pub sets: Vec<PointSet>,
    /// `{A : χ_A ∈ T}`, sorted.
    pub s0: Vec<PointSet>,
    /// For each point, the intersection of the members containing it;
    /// deduplicated and sorted.
    pub atoms: Vec<PointSet>,
    pub carrier_len: usize,
}

impl SigmaAlgebraB0 {
    pub fn contains(&self, a: PointSet) -> bool {
        self.sets.binary_search(&a).is_ok()
    }

    /// Exhaustive check of the σ-algebra laws; on a finite family countable
    /// unions are finite unions.
    pub fn verify(&self) -> Verdict<String> {
        let full = PointSet::full(self.carrier_len);
        if !self.contains(PointSet::EMPTY) {
            return Verdict::Fails("missing the empty set".into());
        }
        if !self.contains(full) {
            return Verdict::Fails("missing the whole carrier".into());
        }
        for &a in &self.sets {
            if !self.contains(full.difference(a)) {
                return Verdict::Fails(format!("not closed under complement at {:#x}", a.0));
            }
            for &b in &self.sets {
                if !self.contains(a.union(b)) {
                    return Verdict::Fails(format!(
                        "not closed under union at {:#x}, {:#x}",
                        a.0, b.0
                    ));
                }
            }
        }
        Verdict::Holds
    }

    pub fn equals_s0(&self) -> bool {
        self.sets == self.s0
    }
}

#[derive(Clone, Debug)]
pub struct Representation {
    tribe: EffectTribe,
    target: EffectAlgebra,
    h: Vec<Elem>,
    omega0: PointSet,
    ideal: Vec<PointSet>,
    tribe_algebra: EffectAlgebra,
    representatives: Vec<usize>,
    b0: OnceLock<SigmaAlgebraB0>,
}

impl Representation {
    /// Validates that `h` (indexed like the tribe's functions) is a
    /// surjective homomorphism preserving `1`, and that `ideal` contains `∅`
    /// and is closed under subsets and unions.
    pub fn new(
        tribe: EffectTribe,
        target: EffectAlgebra,
        h: Vec<Elem>,
        omega0: PointSet,
        mut ideal: Vec<PointSet>,
    ) -> Result<Self, RepresentationError> {
        let bad = |s: String| Err(RepresentationError::InvalidRepresentation(s));
        let n = tribe.carrier.len();
        if h.len() != tribe.len() {
            return bad(format!(
                "h has {} entries for {} functions",
                h.len(),
                tribe.len()
            ));
        }
        if let Some(e) = h.iter().find(|e| e.index() >= target.len()) {
            return bad(format!("h maps to unknown element {e}"));
        }
        if !omega0.is_subset(PointSet::full(n)) {
            return bad("omega0 exceeds the carrier".into());
        }
        let mut representatives = vec![usize::MAX; target.len()];
        for (i, e) in h.iter().enumerate().rev() {
            representatives[e.index()] = i;
        }
        if let Some(b) = target
            .elements()
            .find(|b| representatives[b.index()] == usize::MAX)
        {
            return bad(format!("h misses {}", target.label(b)));
        }
        let one = tribe
            .index_of(&FuzzyFn::constant(n, Q::one()))
            .expect("tribe contains 1");
        if h[one] != target.one() {
            return bad("h(1) is not 1".into());
        }
        let tribe_algebra = tribe.as_algebra();
        for (f, g, s) in tribe_algebra.defined_sums() {
            if target.sum(h[f.index()], h[g.index()]) != Some(h[s.index()]) {
                return bad(format!(
                    "h({}) + h({}) != h({})",
                    tribe_algebra.label(f),
                    tribe_algebra.label(g),
                    tribe_algebra.label(s)
                ));
            }
        }
        ideal.sort();
        ideal.dedup();
        if ideal.binary_search(&PointSet::EMPTY).is_err() {
            return bad("ideal does not contain the empty set".into());
        }
        for &a in &ideal {
            if !a.is_subset(PointSet::full(n)) {
                return bad("ideal member exceeds the carrier".into());
            }
            for &b in &ideal {
                if ideal.binary_search(&a.union(b)).is_err() {
                    return bad("ideal not closed under unions".into());
                }
            }
            let mut sub = a.0;
            loop {
                sub = sub.wrapping_sub(1) & a.0;
                if ideal.binary_search(&PointSet(sub)).is_err() {
                    return bad("ideal not closed under subsets".into());
                }
                if sub == 0 {
                    break;
                }
            }
        }
        Ok(Representation {
            tribe,
            target,
            h,
            omega0,
            ideal,
            tribe_algebra,
            representatives,
            b0: OnceLock::new(),
        })
    }

    pub fn tribe(&self) -> &EffectTribe {
        &self.tribe
    }

    pub fn target(&self) -> &EffectAlgebra {
        &self.target
    }

    pub fn tribe_algebra(&self) -> &EffectAlgebra {
        &self.tribe_algebra
    }

    pub fn h(&self) -> &[Elem] {
        &self.h
    }

    pub fn omega0(&self) -> PointSet {
        self.omega0
    }

    pub fn ideal(&self) -> &[PointSet] {
        &self.ideal
    }

    pub fn carrier_len(&self) -> usize {
        self.tribe.carrier.len()
    }

    pub fn in_ideal(&self, a: PointSet) -> bool {
        self.ideal.binary_search(&a).is_ok()
    }

    /// `h(f)`, or `None` if `f ∉ T`.
    pub fn apply(&self, f: &FuzzyFn) -> Option<Elem> {
        self.tribe.index_of(f).map(|i| self.h[i])
    }

    /// The first function (in tribe order) mapped to `b`.
    pub fn representative(&self, b: Elem) -> &FuzzyFn {
        &self.tribe.functions[self.representatives[b.index()]]
    }

    pub fn preimage(&self, b: Elem) -> Vec<usize> {
        (0..self.h.len()).filter(|&i| self.h[i] == b).collect()
    }

    /// `f ~ b`: `f` and the representative of `b` differ only on an ideal
    /// subset of `Ω₀`.
    pub fn equivalent(&self, f: &FuzzyFn, b: Elem) -> bool {
        self.in_ideal(f.sub(self.representative(b)).support(self.omega0))
    }

    /// The state `b ↦ f_b(ω)` of each point `ω ∈ Ω₀`, in point order. For a
    /// canonical representation these are the extremal states.
    pub fn point_states(&self) -> Vec<State> {
        self.omega0
            .points()
            .map(|w| State {
                values: self
                    .target
                    .elements()
                    .map(|b| self.representative(b).0[w].clone())
                    .collect(),
            })
            .collect()
    }

    pub fn b0(&self) -> &SigmaAlgebraB0 {
        self.b0.get_or_init(|| {
            let n = self.carrier_len();
            let mut sets = vec![];
            let mut s0 = vec![];
            for (i, f) in self.tribe.functions.iter().enumerate() {
                if let Some(a) = f.as_characteristic() {
                    s0.push(a);
                    if is_sharp(&self.tribe_algebra, Elem::from_index(i)) {
                        sets.push(a);
                    }
                }
            }
            sets.sort();
            s0.sort();
            let mut atoms: Vec<PointSet> = (0..n)
                .map(|w| {
                    sets.iter()
                        .filter(|a| a.contains(w))
                        .fold(PointSet::full(n), |acc, &a| acc.intersection(a))
                })
                .collect();
            atoms.sort();
            atoms.dedup();
            SigmaAlgebraB0 {
                sets,
                s0,
                atoms,
                carrier_len: n,
            }
        })
    }

    /// Constant on every atom of `B₀(T)`.
    pub fn measurable(&self, f: &FuzzyFn) -> bool {
        self.b0().atoms.iter().all(|&a| f.is_constant_on(a))
    }

    /// `s = max{f, min{g, s₁}}` with `s₁` the representative of `c`; then
    /// `f ≤ s ≤ g` and `h(s) = c` are checked.
    pub fn sandwich(
        &self,
        f: &FuzzyFn,
        g: &FuzzyFn,
        c: Elem,
    ) -> Result<FuzzyFn, RepresentationError> {
        let pre = |s: &str| Err(RepresentationError::PreconditionFailed(s.into()));
        let (Some(hf), Some(hg)) = (self.apply(f), self.apply(g)) else {
            return pre("f and g must belong to the tribe");
        };
        if !f.leq(g) {
            return pre("f <= g fails pointwise");
        }
        if !self.target.leq(hf, c) || !self.target.leq(c, hg) {
            return pre("h(f) <= c <= h(g) fails");
        }
        let s = f.max(&g.min(self.representative(c)));
        match self.apply(&s) {
            Some(hs) if hs == c => Ok(s),
            _ => Err(RepresentationError::SandwichOutsideTribe(s.to_string())),
        }
    }

    /// `h(f) = 0` iff `χ_N ∈ T` and `h(χ_N) = 0` where `N = N_{Ω₀}(f)`; the
    /// first function violating this is the witness.
    pub fn check_regular(&self) -> Verdict<FuzzyFn> {
        let n = self.carrier_len();
        let zero = self.target.zero();
        for (i, f) in self.tribe.functions.iter().enumerate() {
            let chi = FuzzyFn::characteristic(n, f.support(self.omega0));
            let rhs = self.apply(&chi) == Some(zero);
            if (self.h[i] == zero) != rhs {
                return Verdict::Fails(f.clone());
            }
        }
        Verdict::Holds
    }

    /// `h(f) = h(g)` iff `N_Ω(f − g)` lies in the ideal, for all pairs.
    pub fn check_ideal_congruence(&self) -> Verdict<(FuzzyFn, FuzzyFn)> {
        let full = PointSet::full(self.carrier_len());
        let fs = &self.tribe.functions;
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                let null = self.in_ideal(fs[i].sub(&fs[j]).support(full));
                if (self.h[i] == self.h[j]) != null {
                    return Verdict::Fails((fs[i].clone(), fs[j].clone()));
                }
            }
        }
        Verdict::Holds
    }

    /// Compares `h(B₀(T))` with `Sh(M)` and records whether the
    /// representation meets the measurability hypotheses.
    pub fn sharp_image(&self) -> SharpImage {
        let n = self.carrier_len();
        let mut image: Vec<Elem> = self
            .b0()
            .sets
            .iter()
            .map(|&a| {
                self.apply(&FuzzyFn::characteristic(n, a))
                    .expect("B0 set in tribe")
            })
            .collect();
        image.sort();
        image.dedup();
        let sharp: Vec<Elem> = self
            .target
            .elements()
            .filter(|&a| is_sharp(&self.target, a))
            .collect();
        let hypotheses = self
            .tribe
            .functions
            .iter()
            .all(|f| self.measurable(f) && self.tribe.contains(&f.min(&f.complement())));
        SharpImage {
            image,
            sharp,
            regular: self.check_regular().holds(),
            hypotheses,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpImage {
    pub image: Vec<Elem>,
    pub sharp: Vec<Elem>,
    pub regular: bool,
    /// Every `f` is `B₀`-measurable and `min{f, 1 − f} ∈ T`.
    pub hypotheses: bool,
}

impl SharpImage {
    pub fn holds(&self) -> bool {
        self.image == self.sharp
    }
}

/// The canonical representation: `Ω` is the set of extremal states (points
/// `s0, s1, …` in vertex order), `T` the evaluations `â|Ω`, `h(â) = a`, and
/// the ideal is `{∅}`.
pub fn canonical_representation(m: &EffectAlgebra) -> Result<Representation, RepresentationError> {
    if !check_rdp(m).holds() {
        return Err(RepresentationError::RdpRequired);
    }
    canonical_from_polytope(m, &state_polytope(m)?)
}

/// As [`canonical_representation`] with a precomputed polytope; the RDP
/// precondition is the caller's.
pub fn canonical_from_polytope(
    m: &EffectAlgebra,
    poly: &StatePolytope,
) -> Result<Representation, RepresentationError> {
    if poly.is_empty() {
        return Err(RepresentationError::EmptyStateSpace);
    }
    let k = poly.vertices.len();
    if k > MAX_CARRIER {
        return Err(RepresentationError::CarrierTooLarge(k));
    }
    let functions: Vec<FuzzyFn> = m
        .elements()
        .map(|a| FuzzyFn(poly.vertices.iter().map(|v| v.value(a).clone()).collect()))
        .collect();
    if !separating(poly) {
        let mut seen: HashMap<&FuzzyFn, Elem> = HashMap::new();
        for (a, f) in m.elements().zip(&functions) {
            if let Some(&b) = seen.get(f) {
                return Err(RepresentationError::NonSeparatingStates {
                    a: m.label(b).into(),
                    b: m.label(a).into(),
                });
            }
            seen.insert(f, a);
        }
    }
    let carrier = (0..k).map(|i| format!("s{i}")).collect();
    let tribe = EffectTribe::new(carrier, functions)?;
    let h = m.elements().collect();
    Representation::new(
        tribe,
        m.clone(),
        h,
        PointSet::full(k),
        vec![PointSet::EMPTY],
    )
}
