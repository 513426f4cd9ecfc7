//! Riesz decomposition property.

use serde::Serialize;

use crate::algebra::{EffectAlgebra, Elem};
use crate::par::{self, Exec};
use crate::Verdict;

/// `c11 + c12 = a1`, `c21 + c22 = a2`, `c11 + c21 = b1`, `c12 + c22 = b2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementMatrix {
    pub c11: Elem,
    pub c12: Elem,
    pub c21: Elem,
    pub c22: Elem,
}

impl RefinementMatrix {
    pub fn refines(&self, m: &EffectAlgebra, q: &Decompositions) -> bool {
        m.sum(self.c11, self.c12) == Some(q.a1)
            && m.sum(self.c21, self.c22) == Some(q.a2)
            && m.sum(self.c11, self.c21) == Some(q.b1)
            && m.sum(self.c12, self.c22) == Some(q.b2)
    }
}

/// Two decompositions `a1 + a2 = b1 + b2` of the same element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decompositions {
    pub a1: Elem,
    pub a2: Elem,
    pub b1: Elem,
    pub b2: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RdpFailure {
    pub instance: Decompositions,
    /// Number of candidate 2×2 matrices rejected while confirming the
    /// failure: every matrix over the algebra, i.e. `|M|⁴`.
    pub matrices_examined: u64,
}

/// Finds a refinement by walking `c11` over the common lower bounds of `a1`
/// and `b1`; the other three entries are then forced.
pub fn refine(m: &EffectAlgebra, q: &Decompositions) -> Option<RefinementMatrix> {
    m.elements().find_map(|c11| {
        if !(m.leq(c11, q.a1) && m.leq(c11, q.b1)) {
            return None;
        }
        let c12 = m.minus(q.a1, c11)?;
        let c21 = m.minus(q.b1, c11)?;
        let c22 = m.minus(q.a2, c21)?;
        let r = RefinementMatrix { c11, c12, c21, c22 };
        r.refines(m, q).then_some(r)
    })
}

pub fn check_rdp(m: &EffectAlgebra) -> Verdict<RdpFailure> {
    check_rdp_with(m, Exec::default())
}

/// Exhaustive RDP check. The reported instance is the lexicographically
/// first `(a1, a2, b1, b2)` without a refinement, independent of `exec`.
pub fn check_rdp_with(m: &EffectAlgebra, exec: Exec) -> Verdict<RdpFailure> {
    let n = m.len();
    let failing = par::find_first(exec, 0..n * n, |i| {
        let (a1, a2) = (Elem::from_index(i / n), Elem::from_index(i % n));
        let s = m.sum(a1, a2)?;
        m.elements().find_map(|b1| {
            let b2 = m.minus(s, b1)?;
            let q = Decompositions { a1, a2, b1, b2 };
            refine(m, &q).is_none().then_some(q)
        })
    });
    match failing {
        None => Verdict::Holds,
        Some(instance) => {
            let (found, examined) = exhaustive_search(m, &instance, exec);
            assert!(
                found.is_none(),
                "guided and exhaustive refinement searches disagree"
            );
            Verdict::Fails(RdpFailure {
                instance,
                matrices_examined: examined,
            })
        }
    }
}

/// Tries every matrix in `M⁴`.
fn exhaustive_search(
    m: &EffectAlgebra,
    q: &Decompositions,
    exec: Exec,
) -> (Option<RefinementMatrix>, u64) {
    let n = m.len();
    let found = par::find_first(exec, 0..n * n, |i| {
        let (c11, c12) = (Elem::from_index(i / n), Elem::from_index(i % n));
        m.elements().find_map(|c21| {
            m.elements().find_map(|c22| {
                let r = RefinementMatrix { c11, c12, c21, c22 };
                r.refines(m, q).then_some(r)
            })
        })
    });
    (found, (n as u64).pow(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{generate, Family};

    fn alg(f: Family) -> EffectAlgebra {
        generate(&f, 64).unwrap()
    }

    #[test]
    fn boolean_and_chain_hold() {
        assert_eq!(check_rdp(&alg(Family::Boolean(2))), Verdict::Holds);
        assert_eq!(check_rdp(&alg(Family::Chain(3))), Verdict::Holds);
    }

    #[test]
    fn mo2_fails_at_unit() {
        let m = alg(Family::mo2());
        let e = |l: &str| m.elem(l).unwrap();
        let Verdict::Fails(f) = check_rdp(&m) else {
            panic!("MO2 has RDP?")
        };
        assert_eq!(
            f.instance,
            Decompositions {
                a1: e("0:10"),
                a2: e("0:01"),
                b1: e("1:10"),
                b2: e("1:01")
            }
        );
        assert_eq!(m.sum(f.instance.a1, f.instance.a2), Some(m.one()));
        assert_eq!(f.matrices_examined, 6u64.pow(4));
    }

    #[test]
    fn refinement_is_returned() {
        let m = alg(Family::Chain(3));
        let e = |l: &str| m.elem(l).unwrap();
        let q = Decompositions {
            a1: e("1"),
            a2: e("2"),
            b1: e("2"),
            b2: e("1"),
        };
        let r = refine(&m, &q).unwrap();
        assert!(r.refines(&m, &q));
        assert_eq!(r.c11, e("0"));
    }

    #[test]
    fn modes_agree_on_failure_witness() {
        let m = alg(Family::HorizontalSum(vec![
            Family::Boolean(2),
            Family::Boolean(2),
            Family::Boolean(2),
        ]));
        assert_eq!(
            check_rdp_with(&m, Exec::Sequential),
            check_rdp_with(&m, Exec::Parallel)
        );
    }
}
