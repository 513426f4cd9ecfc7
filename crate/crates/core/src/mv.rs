//! Detecting MV-algebra structure on a finite effect algebra.
//!
//! The candidate total sum is `a ⊕ b := a + (a' ∧ b)` with `a* := a'`. This
//! is the only candidate: in an MV-algebra it is forced by the lattice order.

use std::fmt;

use serde::Serialize;

use crate::algebra::{EffectAlgebra, Elem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MvAxiom {
    Commutativity,
    Associativity,
    ZeroNeutral,
    OneAbsorbing,
    Involution,
    Complement,
    ZeroStar,
    /// `(a* ⊕ b)* ⊕ b = (a ⊕ b*)* ⊕ a`
    Lukasiewicz,
    /// Not an MV axiom: the partial sum induced by ⊕ must be the original.
    InducedSum,
}

impl MvAxiom {
    pub fn numeral(self) -> &'static str {
        match self {
            MvAxiom::Commutativity => "(i)",
            MvAxiom::Associativity => "(ii)",
            MvAxiom::ZeroNeutral => "(iii)",
            MvAxiom::OneAbsorbing => "(iv)",
            MvAxiom::Involution => "(v)",
            MvAxiom::Complement => "(vi)",
            MvAxiom::ZeroStar => "(vii)",
            MvAxiom::Lukasiewicz => "(viii)",
            MvAxiom::InducedSum => "induced +",
        }
    }
}

impl fmt::Display for MvAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.numeral())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MvStructure {
    /// Row-major `|M| × |M|` table of `a ⊕ b`.
    pub oplus: Vec<Elem>,
    pub star: Vec<Elem>,
}

impl MvStructure {
    pub fn oplus(&self, a: Elem, b: Elem) -> Elem {
        self.oplus[a.index() * self.star.len() + b.index()]
    }

    pub fn star(&self, a: Elem) -> Elem {
        self.star[a.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NotMv {
    /// Some pair has no meet or no join.
    NotLattice { a: Elem, b: Elem },
    /// `a + (a' ∧ b)` is undefined for this pair.
    OplusUndefined { a: Elem, b: Elem },
    /// Every failed axiom with its lexicographically first witness.
    AxiomsFail(Vec<(MvAxiom, Vec<Elem>)>),
}

impl NotMv {
    pub fn failed(&self, axiom: MvAxiom) -> bool {
        matches!(self, NotMv::AxiomsFail(v) if v.iter().any(|(a, _)| *a == axiom))
    }
}

pub fn detect_mv(m: &EffectAlgebra) -> Result<MvStructure, NotMv> {
    if let Some((a, b)) = m.lattice_gap() {
        return Err(NotMv::NotLattice { a, b });
    }
    let n = m.len();
    let mut oplus = Vec::with_capacity(n * n);
    for a in m.elements() {
        for b in m.elements() {
            let c = m.meet(m.supplement(a), b).expect("lattice");
            oplus.push(m.sum(a, c).ok_or(NotMv::OplusUndefined { a, b })?);
        }
    }
    let star: Vec<Elem> = m.elements().map(|a| m.supplement(a)).collect();
    let mv = MvStructure { oplus, star };
    let failures = mv_axiom_failures(m, &mv);
    if failures.is_empty() {
        Ok(mv)
    } else {
        Err(NotMv::AxiomsFail(failures))
    }
}

/// Exhaustive check of the eight MV axioms plus agreement of the induced
/// partial sum (`a + b` defined iff `a ≤ b*`) with the table of `m`.
pub fn mv_axiom_failures(m: &EffectAlgebra, mv: &MvStructure) -> Vec<(MvAxiom, Vec<Elem>)> {
    use MvAxiom::*;
    let (zero, one) = (m.zero(), m.one());
    let op = |a, b| mv.oplus(a, b);
    let st = |a| mv.star(a);
    let mut out: Vec<(MvAxiom, Vec<Elem>)> = vec![];
    let mut record = |ax: MvAxiom, w: Vec<Elem>| {
        if !out.iter().any(|(x, _)| *x == ax) {
            out.push((ax, w));
        }
    };
    let els: Vec<Elem> = m.elements().collect();
    for &a in &els {
        if op(a, zero) != a {
            record(ZeroNeutral, vec![a]);
        }
        if op(a, one) != one {
            record(OneAbsorbing, vec![a]);
        }
        if st(st(a)) != a {
            record(Involution, vec![a]);
        }
        if op(a, st(a)) != one {
            record(Complement, vec![a]);
        }
        for &b in &els {
            if op(a, b) != op(b, a) {
                record(Commutativity, vec![a, b]);
            }
            if op(st(op(st(a), b)), b) != op(st(op(a, st(b))), a) {
                record(Lukasiewicz, vec![a, b]);
            }
            let induced = m.leq(a, st(b)).then(|| op(a, b));
            if induced != m.sum(a, b) {
                record(InducedSum, vec![a, b]);
            }
            for &c in &els {
                if op(op(a, b), c) != op(a, op(b, c)) {
                    record(Associativity, vec![a, b, c]);
                }
            }
        }
    }
    if st(zero) != one {
        record(ZeroStar, vec![zero]);
    }
    out.sort_by_key(|(ax, _)| *ax as u8);
    out
}
