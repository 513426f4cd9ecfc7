//! Spectral measures `Λ_a(E) = h(χ_{f_a⁻¹(E)})`, their integrals, φ-transforms,
//! and the unique extension of states from `Sh(M)` to `M`.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{EffectAlgebra, Elem};
use crate::linalg::solve_affine;
use crate::lp::{maximize_free, LpOutcome};
use crate::observables::OutcomeSet;
use crate::par::{self, Exec};
use crate::rational::{fmt_q, in_unit_interval, Q};
use crate::representation::{FuzzyFn, PointSet, Representation};
use crate::sharp::{is_sharp, SharpSet};
use crate::states::{equality_system, is_state, unit_box, State};
use crate::Verdict;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpectralError {
    #[error("level set of value {lambda} is not in B0")]
    SpectralObstruction { lambda: String },
    #[error("spectral integral {integral} differs from m(a) = {value}")]
    IntegralMismatch { integral: String, value: String },
    #[error("{0} is not sharp")]
    NotSharp(String),
    #[error("sharp table gives {table} but the spectral measure gives {measure}")]
    SharpTableMismatch { table: String, measure: String },
    #[error("phi table is not strictly increasing")]
    PhiNotMonotone,
    #[error("phi must fix 0 and 1 and stay inside [0,1]")]
    PhiEndpointViolation,
    #[error("phi table does not cover support point {0}")]
    SupportNotCovered(String),
    #[error("not a state on the sharp elements: {0}")]
    NotAStateOnSharp(String),
    #[error("extension is inconsistent: {0}")]
    ExtensionInconsistent(String),
    #[error("no state on M restricts to the given state on Sh(M)")]
    InfeasibleExtension,
}

/// `Λ_a` by support and masses: `masses[i] = Λ_a({support[i]})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpectralMeasure {
    pub element: Elem,
    #[serde(serialize_with = "ser_qs")]
    pub support: Vec<Q>,
    pub masses: Vec<Elem>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_q))
}

impl SpectralMeasure {
    pub fn mass(&self, lambda: &Q) -> Option<Elem> {
        self.support
            .binary_search(lambda)
            .ok()
            .map(|i| self.masses[i])
    }

    /// `Λ(E)`: the sum of the masses at support points in `E`.
    pub fn measure(&self, m: &EffectAlgebra, e: &OutcomeSet) -> Elem {
        m.sum_all(
            self.support
                .iter()
                .zip(&self.masses)
                .filter(|(t, _)| e.contains(t))
                .map(|(_, &v)| v),
        )
        .expect("masses are orthogonal")
    }

    /// `Σ_λ λ · m(Λ({λ}))`.
    pub fn integral(&self, m: &State) -> Q {
        self.support
            .iter()
            .zip(&self.masses)
            .fold(Q::zero(), |acc, (t, &v)| acc + t * m.value(v))
    }
}

pub fn spectral_measure(rep: &Representation, a: Elem) -> Result<SpectralMeasure, SpectralError> {
    let n = rep.carrier_len();
    let omega0 = rep.omega0();
    let f = rep.representative(a);
    let mut support: Vec<Q> = omega0.points().map(|w| f.0[w].clone()).collect();
    support.sort();
    support.dedup();
    let mut masses = vec![];
    for lambda in &support {
        let level = PointSet::from_points(omega0.points().filter(|&w| &f.0[w] == lambda));
        if !rep.b0().contains(level) {
            return Err(SpectralError::SpectralObstruction {
                lambda: fmt_q(lambda),
            });
        }
        masses.push(
            rep.apply(&FuzzyFn::characteristic(n, level))
                .expect("B0 set in tribe"),
        );
    }
    Ok(SpectralMeasure {
        element: a,
        support,
        masses,
    })
}

/// `Σ_λ λ · m(Λ_a({λ}))`, asserted equal to `m(a)`.
pub fn spectral_integral(rep: &Representation, a: Elem, m: &State) -> Result<Q, SpectralError> {
    let integral = spectral_measure(rep, a)?.integral(m);
    if &integral != m.value(a) {
        return Err(SpectralError::IntegralMismatch {
            integral: fmt_q(&integral),
            value: fmt_q(m.value(a)),
        });
    }
    Ok(integral)
}

/// First pair `a < b` (by index) with `Λ_a = Λ_b`.
pub fn spectral_injectivity(rep: &Representation) -> Result<Verdict<(Elem, Elem)>, SpectralError> {
    let measures = rep
        .target()
        .elements()
        .map(|a| spectral_measure(rep, a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(first_collision(&measures))
}

fn first_collision(measures: &[SpectralMeasure]) -> Verdict<(Elem, Elem)> {
    let mut seen: HashMap<(&[Q], &[Elem]), Elem> = HashMap::new();
    for mu in measures {
        if let Some(&b) = seen.get(&(&mu.support[..], &mu.masses[..])) {
            return Verdict::Fails((b, mu.element));
        }
        seen.insert((&mu.support, &mu.masses), mu.element);
    }
    Verdict::Holds
}

/// `Λ_a(E)` for sharp `a` read off from whether `0` and `1` lie in `E`,
/// checked against the spectral measure.
pub fn sharp_table(rep: &Representation, a: Elem, e: &OutcomeSet) -> Result<Elem, SpectralError> {
    let m = rep.target();
    if !is_sharp(m, a) {
        return Err(SpectralError::NotSharp(m.label(a).into()));
    }
    let table = match (e.contains(&Q::zero()), e.contains(&Q::one())) {
        (false, true) => a,
        (true, false) => m.supplement(a),
        (false, false) => m.zero(),
        (true, true) => m.one(),
    };
    let measure = spectral_measure(rep, a)?.measure(m, e);
    if measure != table {
        return Err(SpectralError::SharpTableMismatch {
            table: m.label(table).into(),
            measure: m.label(measure).into(),
        });
    }
    Ok(table)
}

/// A finite strictly increasing table on `[0,1]` fixing `0` and `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiTransform {
    points: Vec<(Q, Q)>,
}

impl PhiTransform {
    pub fn new(mut points: Vec<(Q, Q)>) -> Result<Self, SpectralError> {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        if points
            .windows(2)
            .any(|w| w[0].0 == w[1].0 || w[0].1 >= w[1].1)
        {
            return Err(SpectralError::PhiNotMonotone);
        }
        let fixes = |x: Q| points.iter().any(|(a, b)| *a == x && *b == x);
        let inside = points
            .iter()
            .all(|(a, b)| in_unit_interval(a) && in_unit_interval(b));
        if !inside || !fixes(Q::zero()) || !fixes(Q::one()) {
            return Err(SpectralError::PhiEndpointViolation);
        }
        Ok(PhiTransform { points })
    }

    pub fn identity_on(values: &[Q]) -> Self {
        let mut pts: Vec<(Q, Q)> = values.iter().map(|x| (x.clone(), x.clone())).collect();
        pts.push((Q::zero(), Q::zero()));
        pts.push((Q::one(), Q::one()));
        pts.sort();
        pts.dedup();
        PhiTransform { points: pts }
    }

    /// `φ(t) = t²` sampled at `values ∪ {0, 1}`.
    pub fn square_on(values: &[Q]) -> Self {
        let mut pts: Vec<(Q, Q)> = values.iter().map(|x| (x.clone(), x * x)).collect();
        pts.push((Q::zero(), Q::zero()));
        pts.push((Q::one(), Q::one()));
        pts.sort();
        pts.dedup();
        PhiTransform { points: pts }
    }

    pub fn apply(&self, t: &Q) -> Option<&Q> {
        self.points
            .binary_search_by(|(a, _)| a.cmp(t))
            .ok()
            .map(|i| &self.points[i].1)
    }

    pub fn covers(&self, mu: &SpectralMeasure) -> bool {
        mu.support.iter().all(|t| self.apply(t).is_some())
    }

    /// `φ(Λ)(E) = Λ(φ⁻¹(E))`: same masses at the moved support points.
    pub fn push_forward(&self, mu: &SpectralMeasure) -> Result<SpectralMeasure, SpectralError> {
        let support = mu
            .support
            .iter()
            .map(|t| {
                self.apply(t)
                    .cloned()
                    .ok_or_else(|| SpectralError::SupportNotCovered(fmt_q(t)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SpectralMeasure {
            element: mu.element,
            support,
            masses: mu.masses.clone(),
        })
    }
}

/// A point state with `∫ λ dm(φ(Λ_a)) ≠ m(a)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiWitness {
    pub state: String,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub integral: Q,
    #[serde(serialize_with = "crate::rational::ser_q")]
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub transformed: SpectralMeasure,
    /// Injectivity of `b ↦ φ(Λ_b)` over the elements whose support the table
    /// covers.
    pub injective: Verdict<(Elem, Elem)>,
    pub elements_compared: usize,
    /// Whether `∫ λ dm(φ(Λ_a)) = m(a)` for every extremal state.
    pub integral: Verdict<PhiWitness>,
}

pub fn transform_spectral(
    rep: &Representation,
    a: Elem,
    phi: &PhiTransform,
) -> Result<PhiReport, SpectralError> {
    let transformed = phi.push_forward(&spectral_measure(rep, a)?)?;
    let mut pushed = vec![];
    for b in rep.target().elements() {
        let mu = spectral_measure(rep, b)?;
        if phi.covers(&mu) {
            pushed.push(phi.push_forward(&mu)?);
        }
    }
    let injective = first_collision(&pushed);
    let carrier = rep.tribe().carrier();
    let integral = rep
        .omega0()
        .points()
        .zip(rep.point_states())
        .find_map(|(w, s)| {
            let integral = transformed.integral(&s);
            (&integral != s.value(a)).then(|| PhiWitness {
                state: carrier[w].clone(),
                integral,
                value: s.value(a).clone(),
            })
        })
        .map_or(Verdict::Holds, Verdict::Fails);
    Ok(PhiReport {
        transformed,
        injective,
        elements_compared: pushed.len(),
        integral,
    })
}

/// A state on the Boolean algebra `Sh(M)`, aligned with `SharpSet::members`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharpState {
    pub members: Vec<Elem>,
    pub values: Vec<Q>,
}

impl SharpState {
    pub fn value(&self, a: Elem) -> Option<&Q> {
        self.members.binary_search(&a).ok().map(|i| &self.values[i])
    }

    /// `m(b) = Σ {p_A : A atom, A ≤ b}`; weights are aligned with `atoms`.
    pub fn from_atom_weights(
        m: &EffectAlgebra,
        sharp: &SharpSet,
        atoms: &[Elem],
        weights: &[Q],
    ) -> Self {
        let values = sharp
            .members
            .iter()
            .map(|&b| {
                atoms
                    .iter()
                    .zip(weights)
                    .filter(|(&at, _)| m.leq(at, b))
                    .fold(Q::zero(), |acc, (_, w)| acc + w)
            })
            .collect();
        SharpState {
            members: sharp.members.clone(),
            values,
        }
    }

    pub fn restrict(sharp: &SharpSet, s: &State) -> Self {
        SharpState {
            members: sharp.members.clone(),
            values: sharp.members.iter().map(|&b| s.value(b).clone()).collect(),
        }
    }

    /// Range, normalization and additivity on sums of sharp elements.
    pub fn validate(&self, m: &EffectAlgebra) -> Result<(), SpectralError> {
        let bad = |s: String| Err(SpectralError::NotAStateOnSharp(s));
        if self.members.len() != self.values.len() {
            return bad("members and values differ in length".into());
        }
        if !self.values.iter().all(in_unit_interval) {
            return bad("value outside [0,1]".into());
        }
        if self.value(m.one()).is_none_or(|v| !v.is_one()) {
            return bad("m(1) != 1".into());
        }
        for &a in &self.members {
            for &b in &self.members {
                let Some(c) = m.sum(a, b) else { continue };
                match self.value(c) {
                    Some(v) if *v == self.value(a).unwrap() + self.value(b).unwrap() => {}
                    _ => {
                        return bad(format!(
                            "m({}) + m({}) != m({})",
                            m.label(a),
                            m.label(b),
                            m.label(c)
                        ))
                    }
                }
            }
        }
        Ok(())
    }
}

/// `m̂(a) = Σ_A f_a(A) · m(h(χ_A))` over the atoms of `B₀(T)`. Checks that
/// `m̂` is a state, restricts to `m`, and agrees with `Σ_λ λ·m(Λ_a({λ}))`.
pub fn extend_state(
    rep: &Representation,
    sharp_state: &SharpState,
) -> Result<State, SpectralError> {
    let m = rep.target();
    sharp_state.validate(m)?;
    let n = rep.carrier_len();
    let weights: Vec<(PointSet, Q)> = rep
        .b0()
        .atoms
        .iter()
        .map(|&at| {
            let xi = rep
                .apply(&FuzzyFn::characteristic(n, at))
                .expect("B0 atom in tribe");
            let w = sharp_state
                .value(xi)
                .cloned()
                .ok_or_else(|| SpectralError::NotSharp(m.label(xi).into()))?;
            Ok((at, w))
        })
        .collect::<Result<_, SpectralError>>()?;
    let mut values = vec![];
    for a in m.elements() {
        let f = rep.representative(a);
        let mut acc = Q::zero();
        for (at, w) in &weights {
            if !f.is_constant_on(*at) {
                return Err(SpectralError::ExtensionInconsistent(format!(
                    "{} is not measurable",
                    m.label(a)
                )));
            }
            if let Some(p) = at.points().next() {
                acc += &f.0[p] * w;
            }
        }
        values.push(acc);
    }
    let ext = State { values };
    is_state(m, &ext.values)
        .map_err(|v| SpectralError::ExtensionInconsistent(format!("not a state: {v}")))?;
    for (&b, v) in sharp_state.members.iter().zip(&sharp_state.values) {
        if ext.value(b) != v {
            return Err(SpectralError::ExtensionInconsistent(format!(
                "restriction differs at {}",
                m.label(b)
            )));
        }
    }
    // the spectral form evaluates m on sharp masses only
    for a in m.elements() {
        let mu = spectral_measure(rep, a)?;
        let spectral = mu
            .support
            .iter()
            .zip(&mu.masses)
            .fold(Q::zero(), |acc, (t, &v)| {
                acc + t * sharp_state.value(v).expect("masses are sharp")
            });
        if &spectral != ext.value(a) {
            return Err(SpectralError::ExtensionInconsistent(format!(
                "atom form {} and spectral form {} differ at {}",
                fmt_q(ext.value(a)),
                fmt_q(&spectral),
                m.label(a)
            )));
        }
    }
    Ok(ext)
}

/// Exact lower and upper bounds of each `s(e)` over a set of states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateBounds {
    pub lower: Vec<Q>,
    pub upper: Vec<Q>,
}

impl CoordinateBounds {
    pub fn is_singleton(&self) -> bool {
        self.lower == self.upper
    }

    /// First element whose range is not a point.
    pub fn first_free(&self) -> Option<Elem> {
        (0..self.lower.len())
            .find(|&i| self.lower[i] != self.upper[i])
            .map(Elem::from_index)
    }
}

/// Minimizes and maximizes every coordinate over the states `s` of `M`
/// with `s(b) = v` for each `(b, v)` in `fixed`; `None` if there are none.
///
/// The polytope is first swept along its free parameters; if every
/// parameter is pinned the bounds are the single remaining point, otherwise
/// each coordinate gets its own pair of programs.
pub fn coordinate_bounds(
    m: &EffectAlgebra,
    fixed: &[(Elem, Q)],
    exec: Exec,
) -> Option<CoordinateBounds> {
    let n = m.len();
    let (_, rows, rhs) = equality_system(m);
    let aff = solve_affine(&rows, &rhs, n)?;
    if aff.dim() == 0 {
        let ok = aff.particular.iter().all(in_unit_interval)
            && fixed.iter().all(|(b, v)| &aff.particular[b.index()] == v);
        return ok.then(|| CoordinateBounds {
            lower: aff.particular.clone(),
            upper: aff.particular.clone(),
        });
    }
    let boxed = unit_box(&aff);
    // constant + coeffs·t ≥ 0  becomes  −coeffs·t ≤ constant
    let mut system: Vec<(Vec<Q>, Q)> = boxed
        .coeffs
        .iter()
        .zip(&boxed.constant)
        .map(|(r, c)| (r.iter().map(|x| -x).collect(), c.clone()))
        .collect();
    // each fixed value is an equality, written as two opposite inequalities
    for (e, v) in fixed {
        let d: Vec<Q> = aff
            .directions
            .iter()
            .map(|dir| dir[e.index()].clone())
            .collect();
        let gap = v - &aff.particular[e.index()];
        system.push((d.iter().map(|x| -x).collect(), -&gap));
        system.push((d, gap));
    }
    let mut a = vec![];
    let mut b = vec![];
    system.sort();
    system.dedup();
    for (row, rhs) in system {
        if row.iter().all(Zero::is_zero) {
            if rhs.is_negative() {
                return None;
            }
        } else {
            a.push(row);
            b.push(rhs);
        }
    }
    let k = aff.dim();
    let unit = |j: usize, sign: i64| -> Vec<Q> {
        (0..k)
            .map(|i| {
                if i == j {
                    Q::from_integer(sign.into())
                } else {
                    Q::zero()
                }
            })
            .collect()
    };
    let sweep = par::map_range(exec, 0..2 * k, |i| {
        maximize_free(&unit(i / 2, if i % 2 == 0 { 1 } else { -1 }), &a, &b)
    });
    let mut point = vec![];
    let mut pinned = true;
    for pair in sweep.chunks(2) {
        match (&pair[0], &pair[1]) {
            (LpOutcome::Optimal { value: hi, .. }, LpOutcome::Optimal { value: neg_lo, .. }) => {
                pinned &= &-neg_lo == hi;
                point.push(hi.clone());
            }
            (LpOutcome::Infeasible, _) | (_, LpOutcome::Infeasible) => return None,
            _ => unreachable!("states live in the unit box"),
        }
    }
    if pinned {
        let x: Vec<Q> = (0..n)
            .map(|e| {
                aff.directions
                    .iter()
                    .zip(&point)
                    .fold(aff.particular[e].clone(), |acc, (d, t)| acc + &d[e] * t)
            })
            .collect();
        return Some(CoordinateBounds {
            lower: x.clone(),
            upper: x,
        });
    }
    let b = &b;
    let bounds = par::map_range(exec, 0..n, |e| {
        let c: Vec<Q> = aff.directions.iter().map(|d| d[e].clone()).collect();
        let neg: Vec<Q> = c.iter().map(|x| -x).collect();
        match (maximize_free(&c, &a, b), maximize_free(&neg, &a, b)) {
            (LpOutcome::Optimal { value: hi, .. }, LpOutcome::Optimal { value: lo, .. }) => {
                (&aff.particular[e] - lo, &aff.particular[e] + hi)
            }
            _ => unreachable!("feasibility established by the sweep"),
        }
    });
    let (lower, upper) = bounds.into_iter().unzip();
    Some(CoordinateBounds { lower, upper })
}

/// Bounds every coordinate over the states restricting to `sharp_state` on
/// `Sh(M)`; the extension is unique iff the bounds coincide.
pub fn extension_uniqueness(
    rep: &Representation,
    sharp_state: &SharpState,
) -> Result<CoordinateBounds, SpectralError> {
    let fixed: Vec<(Elem, Q)> = sharp_state
        .members
        .iter()
        .copied()
        .zip(sharp_state.values.iter().cloned())
        .collect();
    coordinate_bounds(rep.target(), &fixed, Exec::default())
        .ok_or(SpectralError::InfeasibleExtension)
}

/// Result of searching for sharp-valued measures other than `Λ_a` with the
/// same integrals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniquenessSearch {
    pub candidates: u64,
    /// Every candidate reproducing `m(a)` on all point states.
    pub solutions: Vec<SpectralMeasure>,
    /// Set when the search space exceeded `limit` and was skipped.
    pub skipped: bool,
}

/// Enumerates measures that assign each atom of `Sh(M)` to one value in
/// `values ∪ {0,1}` (masses are joins of the atoms sent to a point) and keeps
/// those with `Σ λ·m(mass(λ)) = m(a)` for every point state.
pub fn search_alternative_measures(
    rep: &Representation,
    sharp: &SharpSet,
    a: Elem,
    values: &[Q],
    limit: u64,
) -> UniquenessSearch {
    let m = rep.target();
    let atoms = sharp.atoms(m);
    let mut pts: Vec<Q> = values.to_vec();
    pts.push(Q::zero());
    pts.push(Q::one());
    pts.sort();
    pts.dedup();
    let k = pts.len() as u64;
    let total = k.checked_pow(atoms.len() as u32).unwrap_or(u64::MAX);
    if total > limit {
        return UniquenessSearch {
            candidates: total,
            solutions: vec![],
            skipped: true,
        };
    }
    let states = rep.point_states();
    let mut solutions = vec![];
    for code in 0..total {
        let mut groups: Vec<Vec<Elem>> = vec![vec![]; pts.len()];
        let mut c = code;
        for &at in &atoms {
            groups[(c % k) as usize].push(at);
            c /= k;
        }
        let mut support = vec![];
        let mut masses = vec![];
        for (t, g) in pts.iter().zip(&groups) {
            if g.is_empty() {
                continue;
            }
            let mass = m
                .sum_all(g.iter().copied())
                .expect("atoms of Sh(M) are orthogonal");
            support.push(t.clone());
            masses.push(mass);
        }
        let mu = SpectralMeasure {
            element: a,
            support,
            masses,
        };
        if states.iter().all(|s| &mu.integral(s) == s.value(a)) {
            solutions.push(mu);
        }
    }
    UniquenessSearch {
        candidates: total,
        solutions,
        skipped: false,
    }
}
