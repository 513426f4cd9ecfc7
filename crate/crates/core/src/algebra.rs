//! Finite effect algebras stored as explicit partial-addition tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::par::{self, Exec};

/// Dense element identifier. Labels live in the owning [`EffectAlgebra`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Elem(u32);

impl Elem {
    pub fn from_index(i: usize) -> Self {
        Elem(u32::try_from(i).expect("element index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// (i) commutativity of the partial sum
    Commutativity,
    /// (ii) associativity of the partial sum
    Associativity,
    /// (iii) existence of a supplement
    Supplement,
    /// (iv) `a + 1` defined only for `a = 0`
    Positivity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Commutativity => "(i)",
            Axiom::Associativity => "(ii)",
            Axiom::Supplement => "(iii)",
            Axiom::Positivity => "(iv)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("malformed table: {0}")]
    InvalidTable(String),
    #[error("zero and one coincide")]
    DegenerateUnit,
    #[error("axiom {axiom} violated at {witnesses:?}")]
    AxiomViolation {
        axiom: Axiom,
        witnesses: Vec<String>,
    },
    #[error("element {element} has several supplements {supplements:?}")]
    NonUniqueSupplement {
        element: String,
        supplements: Vec<String>,
    },
    #[error("order not antisymmetric: {a} <= {b} <= {a}")]
    OrderNotAntisymmetric { a: String, b: String },
    #[error("difference {b} - {a} is not unique: {candidates:?}")]
    NonUniqueDifference {
        a: String,
        b: String,
        candidates: Vec<String>,
    },
    #[error("size {size} exceeds the configured bound {limit}")]
    SizeLimitExceeded { size: usize, limit: usize },
}

/// Unvalidated partial-addition table: `sums` lists every defined ordered
/// pair `(a, b, a + b)` by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTable {
    pub labels: Vec<String>,
    pub zero: usize,
    pub one: usize,
    pub sums: Vec<[usize; 3]>,
}

#[derive(Clone, Debug)]
pub struct EffectAlgebra {
    labels: Vec<String>,
    by_label: HashMap<String, Elem>,
    zero: Elem,
    one: Elem,
    table: Vec<Option<Elem>>,
    supplement: Vec<Elem>,
    leq: Vec<bool>,
    diff: Vec<Option<Elem>>,
    meets: OnceLock<Vec<Option<Elem>>>,
    joins: OnceLock<Vec<Option<Elem>>>,
}

impl PartialEq for EffectAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.zero == other.zero
            && self.one == other.one
            && self.table == other.table
    }
}

impl EffectAlgebra {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Elem> + Clone {
        (0..self.len()).map(Elem::from_index)
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn label(&self, a: Elem) -> &str {
        &self.labels[a.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elem(&self, label: &str) -> Option<Elem> {
        self.by_label.get(label).copied()
    }

    pub fn sum(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.table[a.index() * self.len() + b.index()]
    }

    /// Iterated sum; `None` as soon as a partial sum is undefined. The empty
    /// sum is `0`.
    pub fn sum_all<I: IntoIterator<Item = Elem>>(&self, items: I) -> Option<Elem> {
        items
            .into_iter()
            .try_fold(self.zero, |acc, x| self.sum(acc, x))
    }

    pub fn supplement(&self, a: Elem) -> Elem {
        self.supplement[a.index()]
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a.index() * self.len() + b.index()]
    }

    /// `b - a`, the unique `c` with `a + c = b`.
    pub fn minus(&self, b: Elem, a: Elem) -> Option<Elem> {
        self.diff[a.index() * self.len() + b.index()]
    }

    /// Every defined ordered sum `(a, b, a + b)` in lexicographic order.
    pub fn defined_sums(&self) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
        let n = self.len();
        self.table.iter().enumerate().filter_map(move |(i, c)| {
            c.map(|c| (Elem::from_index(i / n), Elem::from_index(i % n), c))
        })
    }

    fn lattice_table(&self, lower: bool) -> Vec<Option<Elem>> {
        let n = self.len();
        par::map_range(Exec::default(), 0..n * n, |i| {
            let (a, b) = (Elem::from_index(i / n), Elem::from_index(i % n));
            let bounds: Vec<Elem> = self
                .elements()
                .filter(|&x| {
                    if lower {
                        self.leq(x, a) && self.leq(x, b)
                    } else {
                        self.leq(a, x) && self.leq(b, x)
                    }
                })
                .collect();
            bounds.iter().copied().find(|&g| {
                bounds.iter().all(|&l| {
                    if lower {
                        self.leq(l, g)
                    } else {
                        self.leq(g, l)
                    }
                })
            })
        })
    }

    /// Greatest lower bound in the derived order, if it exists.
    pub fn meet(&self, a: Elem, b: Elem) -> Option<Elem> {
        let t = self.meets.get_or_init(|| self.lattice_table(true));
        t[a.index() * self.len() + b.index()]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Option<Elem> {
        let t = self.joins.get_or_init(|| self.lattice_table(false));
        t[a.index() * self.len() + b.index()]
    }

    /// First pair (lexicographically) lacking a meet or a join.
    pub fn lattice_gap(&self) -> Option<(Elem, Elem)> {
        self.elements()
            .flat_map(|a| self.elements().map(move |b| (a, b)))
            .find(|&(a, b)| self.meet(a, b).is_none() || self.join(a, b).is_none())
    }

    pub fn to_raw(&self) -> RawTable {
        RawTable {
            labels: self.labels.clone(),
            zero: self.zero.index(),
            one: self.one.index(),
            sums: self
                .defined_sums()
                .map(|(a, b, c)| [a.index(), b.index(), c.index()])
                .collect(),
        }
    }
}

/// Validates a raw table against axioms (i)–(iv) and the derived order.
///
/// Checks run in the order: table shape, (i), (iv), (iii), (ii), order
/// antisymmetry, uniqueness of differences. The first failure is reported
/// with the lexicographically first witness.
pub fn validate_effect_algebra(raw: &RawTable) -> Result<EffectAlgebra, AlgebraError> {
    let n = raw.labels.len();
    if n == 0 {
        return Err(AlgebraError::InvalidTable("no elements".into()));
    }
    if raw.zero >= n || raw.one >= n {
        return Err(AlgebraError::InvalidTable(
            "zero or one out of range".into(),
        ));
    }
    let mut by_label = HashMap::with_capacity(n);
    for (i, l) in raw.labels.iter().enumerate() {
        if by_label.insert(l.clone(), Elem::from_index(i)).is_some() {
            return Err(AlgebraError::InvalidTable(format!("duplicate label {l}")));
        }
    }
    if raw.zero == raw.one {
        return Err(AlgebraError::DegenerateUnit);
    }
    let mut table: Vec<Option<Elem>> = vec![None; n * n];
    for &[a, b, c] in &raw.sums {
        if a >= n || b >= n || c >= n {
            return Err(AlgebraError::InvalidTable(format!(
                "sum entry ({a},{b},{c}) out of range"
            )));
        }
        let slot = &mut table[a * n + b];
        match slot {
            Some(prev) if prev.index() != c => {
                return Err(AlgebraError::InvalidTable(format!(
                    "conflicting sums for ({}, {})",
                    raw.labels[a], raw.labels[b]
                )))
            }
            _ => *slot = Some(Elem::from_index(c)),
        }
    }
    let lbl = |i: usize| raw.labels[i].clone();
    let sum = |a: usize, b: usize| table[a * n + b];
    let exec = Exec::default();

    // (i)
    if let Some((a, b)) = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| sum(a, b) != sum(b, a))
    {
        return Err(AlgebraError::AxiomViolation {
            axiom: Axiom::Commutativity,
            witnesses: vec![lbl(a), lbl(b)],
        });
    }
    // (iv)
    if let Some(a) = (0..n).find(|&a| a != raw.zero && sum(a, raw.one).is_some()) {
        return Err(AlgebraError::AxiomViolation {
            axiom: Axiom::Positivity,
            witnesses: vec![lbl(a), lbl(raw.one)],
        });
    }
    // (iii)
    let mut supplement = Vec::with_capacity(n);
    for a in 0..n {
        let sup: Vec<usize> = (0..n)
            .filter(|&b| sum(a, b).map(Elem::index) == Some(raw.one))
            .collect();
        match sup.as_slice() {
            [] => {
                return Err(AlgebraError::AxiomViolation {
                    axiom: Axiom::Supplement,
                    witnesses: vec![lbl(a)],
                })
            }
            [b] => supplement.push(Elem::from_index(*b)),
            _ => {
                return Err(AlgebraError::NonUniqueSupplement {
                    element: lbl(a),
                    supplements: sup.into_iter().map(lbl).collect(),
                })
            }
        }
    }
    // (ii)
    let assoc = par::find_first(exec, 0..n, |a| {
        for b in 0..n {
            for c in 0..n {
                let lhs = sum(a, b).and_then(|ab| sum(ab.index(), c));
                let rhs = sum(b, c).and_then(|bc| sum(a, bc.index()));
                if lhs != rhs {
                    return Some((a, b, c));
                }
            }
        }
        None
    });
    if let Some((a, b, c)) = assoc {
        return Err(AlgebraError::AxiomViolation {
            axiom: Axiom::Associativity,
            witnesses: vec![lbl(a), lbl(b), lbl(c)],
        });
    }

    let mut leq = vec![false; n * n];
    let mut diff = vec![None; n * n];
    for a in 0..n {
        for c in 0..n {
            if let Some(b) = sum(a, c) {
                let b = b.index();
                leq[a * n + b] = true;
                match diff[a * n + b] {
                    None => diff[a * n + b] = Some(Elem::from_index(c)),
                    Some(_) => {
                        let candidates = (0..n)
                            .filter(|&x| sum(a, x).map(Elem::index) == Some(b))
                            .map(lbl)
                            .collect();
                        return Err(AlgebraError::NonUniqueDifference {
                            a: lbl(a),
                            b: lbl(b),
                            candidates,
                        });
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if leq[a * n + b] && leq[b * n + a] {
                return Err(AlgebraError::OrderNotAntisymmetric {
                    a: lbl(a),
                    b: lbl(b),
                });
            }
        }
    }

    Ok(EffectAlgebra {
        labels: raw.labels.clone(),
        by_label,
        zero: Elem::from_index(raw.zero),
        one: Elem::from_index(raw.one),
        table,
        supplement,
        leq,
        diff,
        meets: OnceLock::new(),
        joins: OnceLock::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn two_element() -> RawTable {
        RawTable {
            labels: labels(&["0", "1"]),
            zero: 0,
            one: 1,
            sums: vec![[0, 0, 0], [0, 1, 1], [1, 0, 1]],
        }
    }

    #[test]
    fn smallest_algebra() {
        let m = validate_effect_algebra(&two_element()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.supplement(m.zero()), m.one());
        assert!(m.leq(m.zero(), m.one()));
        assert_eq!(m.minus(m.one(), m.zero()), Some(m.one()));
    }

    #[test]
    fn chain_of_four() {
        let mut sums = vec![];
        for a in 0..4 {
            for b in 0..4 {
                if a + b <= 3 {
                    sums.push([a, b, a + b]);
                }
            }
        }
        let raw = RawTable {
            labels: labels(&["0", "1", "2", "3"]),
            zero: 0,
            one: 3,
            sums,
        };
        let m = validate_effect_algebra(&raw).unwrap();
        let e = |i| Elem::from_index(i);
        assert_eq!(m.supplement(e(1)), e(2));
        assert_eq!(m.meet(e(1), e(2)), Some(e(1)));
        assert_eq!(m.join(e(1), e(2)), Some(e(2)));
        assert_eq!(m.minus(e(3), e(1)), Some(e(2)));
        assert_eq!(m.minus(e(1), e(3)), None);
        assert_eq!(m.sum_all([e(1), e(1), e(1)]), Some(e(3)));
        assert_eq!(m.sum_all([e(2), e(2)]), None);
        assert_eq!(validate_effect_algebra(&m.to_raw()).unwrap(), m);
    }

    #[test]
    fn positivity_violation() {
        // a + 1 = a with a != 0; a also lacks a supplement, (iv) is checked first
        let raw = RawTable {
            labels: labels(&["0", "a", "1"]),
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
            Err(AlgebraError::AxiomViolation {
                axiom: Axiom::Positivity,
                witnesses,
            }) => {
                assert_eq!(witnesses, labels(&["a", "1"]))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn commutativity_violation() {
        let mut raw = two_element();
        raw.sums.retain(|s| *s != [1, 0, 1]);
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::AxiomViolation {
                axiom: Axiom::Commutativity,
                ..
            })
        ));
    }

    #[test]
    fn missing_supplement_and_duplicates() {
        // {0, a, b, 1} with a + b = 1 and a + a = 1: a has two supplements
        let raw = RawTable {
            labels: labels(&["0", "a", "b", "1"]),
            zero: 0,
            one: 3,
            sums: vec![
                [0, 0, 0],
                [0, 1, 1],
                [1, 0, 1],
                [0, 2, 2],
                [2, 0, 2],
                [0, 3, 3],
                [3, 0, 3],
                [1, 2, 3],
                [2, 1, 3],
                [1, 1, 3],
            ],
        };
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::NonUniqueSupplement { .. })
        ));
        let raw = RawTable {
            labels: labels(&["0", "a", "1"]),
            zero: 0,
            one: 2,
            sums: vec![[0, 0, 0], [0, 1, 1], [1, 0, 1], [0, 2, 2], [2, 0, 2]],
        };
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::AxiomViolation {
                axiom: Axiom::Supplement,
                ..
            })
        ));
    }

    #[test]
    fn associativity_violation() {
        // chain {0,…,4} with 1 + 2 undefined: 2 + (1 + 1) = 4 but 2 + 1 is not
        let mut sums = vec![];
        for a in 0..5usize {
            for b in 0..5usize {
                if a + b <= 4 && !matches!((a, b), (1, 2) | (2, 1)) {
                    sums.push([a, b, a + b]);
                }
            }
        }
        let raw = RawTable {
            labels: labels(&["0", "1", "2", "3", "4"]),
            zero: 0,
            one: 4,
            sums,
        };
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::AxiomViolation {
                axiom: Axiom::Associativity,
                ..
            })
        ));
    }

    #[test]
    fn shape_errors() {
        let mut raw = two_element();
        raw.one = 0;
        assert_eq!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::DegenerateUnit)
        );
        let mut raw = two_element();
        raw.sums.push([0, 1, 5]);
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::InvalidTable(_))
        ));
        let mut raw = two_element();
        raw.sums.push([0, 1, 0]);
        assert!(matches!(
            validate_effect_algebra(&raw),
            Err(AlgebraError::InvalidTable(_))
        ));
    }
}
