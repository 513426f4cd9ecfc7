//! Sharp elements and the Boolean structure of `Sh(M)`.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{EffectAlgebra, Elem};
use crate::rdp::check_rdp;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("sharp elements violate the Boolean law `{law}` at {witnesses:?}")]
pub struct BooleanStructureFailure {
    pub law: &'static str,
    pub witnesses: Vec<String>,
}

/// `Sh(M)` with meet and join computed inside the sub-poset of sharp
/// elements. Tables are indexed by position in `members`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpSet {
    pub members: Vec<Elem>,
    pub meet: Vec<Option<Elem>>,
    pub join: Vec<Option<Elem>>,
    /// Set when the parent has RDP and every Boolean law was checked.
    pub boolean_verified: bool,
}

impl SharpSet {
    pub fn contains(&self, a: Elem) -> bool {
        self.members.binary_search(&a).is_ok()
    }

    fn pos(&self, a: Elem) -> usize {
        self.members.binary_search(&a).expect("sharp member")
    }

    pub fn meet_of(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.meet[self.pos(a) * self.members.len() + self.pos(b)]
    }

    pub fn join_of(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.join[self.pos(a) * self.members.len() + self.pos(b)]
    }

    /// Minimal nonzero members. In a finite Boolean algebra every member is
    /// the join of the atoms below it.
    pub fn atoms(&self, m: &EffectAlgebra) -> Vec<Elem> {
        self.members
            .iter()
            .copied()
            .filter(|&a| {
                a != m.zero()
                    && self
                        .members
                        .iter()
                        .all(|&b| b == m.zero() || b == a || !m.leq(b, a))
            })
            .collect()
    }
}

pub fn is_sharp(m: &EffectAlgebra, a: Elem) -> bool {
    m.meet(a, m.supplement(a)) == Some(m.zero())
}

/// All `a` with `a ∧ a' = 0`. When `M` has RDP the result is additionally
/// checked to be a Boolean algebra.
pub fn sharp_elements(m: &EffectAlgebra) -> Result<SharpSet, BooleanStructureFailure> {
    let rdp = check_rdp(m).holds();
    sharp_elements_inner(m, rdp)
}

pub(crate) fn sharp_elements_inner(
    m: &EffectAlgebra,
    verify_boolean: bool,
) -> Result<SharpSet, BooleanStructureFailure> {
    let members: Vec<Elem> = m.elements().filter(|&a| is_sharp(m, a)).collect();
    let k = members.len();
    let bound = |lower: bool, a: Elem, b: Elem| {
        let cands: Vec<Elem> = members
            .iter()
            .copied()
            .filter(|&x| {
                if lower {
                    m.leq(x, a) && m.leq(x, b)
                } else {
                    m.leq(a, x) && m.leq(b, x)
                }
            })
            .collect();
        cands.iter().copied().find(|&g| {
            cands
                .iter()
                .all(|&l| if lower { m.leq(l, g) } else { m.leq(g, l) })
        })
    };
    let mut meet = Vec::with_capacity(k * k);
    let mut join = Vec::with_capacity(k * k);
    for &a in &members {
        for &b in &members {
            meet.push(bound(true, a, b));
            join.push(bound(false, a, b));
        }
    }
    let mut set = SharpSet {
        members,
        meet,
        join,
        boolean_verified: false,
    };
    if verify_boolean {
        verify_boolean_laws(m, &set)?;
        set.boolean_verified = true;
    }
    Ok(set)
}

/// Exhaustive check of the Boolean-algebra identities on `Sh(M)`.
pub fn verify_boolean_laws(m: &EffectAlgebra, s: &SharpSet) -> Result<(), BooleanStructureFailure> {
    let fail = |law: &'static str, xs: &[Elem]| BooleanStructureFailure {
        law,
        witnesses: xs.iter().map(|&x| m.label(x).to_string()).collect(),
    };
    let (zero, one) = (m.zero(), m.one());
    if !s.contains(zero) || !s.contains(one) {
        return Err(fail("0, 1 sharp", &[zero, one]));
    }
    for &a in &s.members {
        let na = m.supplement(a);
        if !s.contains(na) {
            return Err(fail("closed under '", &[a]));
        }
        if s.meet_of(a, na) != Some(zero) || s.join_of(a, na) != Some(one) {
            return Err(fail("complement", &[a]));
        }
        if s.meet_of(a, a) != Some(a) || s.join_of(a, a) != Some(a) {
            return Err(fail("idempotence", &[a]));
        }
        if s.meet_of(a, one) != Some(a) || s.join_of(a, zero) != Some(a) {
            return Err(fail("bounds", &[a]));
        }
    }
    for &a in &s.members {
        for &b in &s.members {
            let (Some(ab), Some(aob)) = (s.meet_of(a, b), s.join_of(a, b)) else {
                return Err(fail("meet and join exist", &[a, b]));
            };
            if s.meet_of(b, a) != Some(ab) || s.join_of(b, a) != Some(aob) {
                return Err(fail("commutativity", &[a, b]));
            }
            if s.meet_of(a, aob) != Some(a) || s.join_of(a, ab) != Some(a) {
                return Err(fail("absorption", &[a, b]));
            }
            let (na, nb) = (m.supplement(a), m.supplement(b));
            if s.meet_of(na, nb) != Some(m.supplement(aob)) {
                return Err(fail("de Morgan", &[a, b]));
            }
            if m.leq(a, nb) && m.sum(a, b) != Some(aob) {
                return Err(fail("orthogonal sum is join", &[a, b]));
            }
            for &c in &s.members {
                let lhs = s.meet_of(a, s.join_of(b, c).unwrap());
                let rhs = s.join_of(s.meet_of(a, b).unwrap(), s.meet_of(a, c).unwrap());
                if lhs != rhs {
                    return Err(fail("distributivity", &[a, b, c]));
                }
                let l2 = s.meet_of(ab, c);
                let r2 = s.meet_of(a, s.meet_of(b, c).unwrap());
                if l2 != r2 {
                    return Err(fail("associativity", &[a, b, c]));
                }
            }
        }
    }
    Ok(())
}
