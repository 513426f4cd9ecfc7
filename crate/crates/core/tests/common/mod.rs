//! Brute-force oracles built only from the raw sum triples of an algebra.
//! They share no search code with the library.
#![allow(dead_code)]

use std::collections::HashMap;

use effecta::observables::{make_observable, Observable};
use effecta::{generate, EffectAlgebra, Elem, Family, Q};
use num_traits::{One, Signed, Zero};

pub fn alg(spec: &str) -> EffectAlgebra {
    generate(&spec.parse::<Family>().unwrap(), 64).unwrap()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Lookup tables over indices.
pub struct Table {
    pub n: usize,
    pub zero: usize,
    pub one: usize,
    sum: HashMap<(usize, usize), usize>,
    /// `(c, a) -> b` with `a + b = c`.
    diff: HashMap<(usize, usize), usize>,
    le: Vec<bool>,
}

impl Table {
    pub fn of(m: &EffectAlgebra) -> Table {
        let raw = m.to_raw();
        let mut sum = HashMap::new();
        let mut diff = HashMap::new();
        for &[a, b, c] in &raw.sums {
            sum.insert((a, b), c);
            sum.insert((b, a), c);
            diff.insert((c, a), b);
            diff.insert((c, b), a);
        }
        let n = raw.labels.len();
        let le = (0..n * n)
            .map(|i| diff.contains_key(&(i % n, i / n)))
            .collect();
        Table {
            n,
            zero: raw.zero,
            one: raw.one,
            sum,
            diff,
            le,
        }
    }

    pub fn add(&self, a: usize, b: usize) -> Option<usize> {
        self.sum.get(&(a, b)).copied()
    }

    pub fn minus(&self, c: usize, a: usize) -> Option<usize> {
        self.diff.get(&(c, a)).copied()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.le[a * self.n + b]
    }

    pub fn supplement(&self, a: usize) -> usize {
        self.minus(self.one, a)
            .expect("every element has a supplement")
    }

    /// Greatest lower bound among `within`, by exhaustion.
    pub fn meet_in(&self, a: usize, b: usize, within: &[usize]) -> Option<usize> {
        let lower: Vec<usize> = within
            .iter()
            .copied()
            .filter(|&c| self.leq(c, a) && self.leq(c, b))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&c| lower.iter().all(|&d| self.leq(d, c)))
    }

    pub fn join_in(&self, a: usize, b: usize, within: &[usize]) -> Option<usize> {
        let upper: Vec<usize> = within
            .iter()
            .copied()
            .filter(|&c| self.leq(a, c) && self.leq(b, c))
            .collect();
        upper
            .iter()
            .copied()
            .find(|&c| upper.iter().all(|&d| self.leq(c, d)))
    }

    pub fn all(&self) -> Vec<usize> {
        (0..self.n).collect()
    }
}

/// Whether `a1 + a2 = b1 + b2` has a 2×2 refinement, trying every corner.
pub fn refinable(t: &Table, [a1, a2, b1, b2]: [usize; 4]) -> bool {
    (0..t.n).any(|c11| {
        let Some(c12) = t.minus(a1, c11) else {
            return false;
        };
        let Some(c21) = t.minus(b1, c11) else {
            return false;
        };
        let Some(c22) = t.minus(a2, c21) else {
            return false;
        };
        t.add(c12, c22) == Some(b2)
    })
}

/// First equal-sum quadruple without a refinement.
pub fn rdp_counterexample(t: &Table) -> Option<[usize; 4]> {
    let mut by_sum: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for a in 0..t.n {
        for b in 0..t.n {
            if let Some(c) = t.add(a, b) {
                by_sum.entry(c).or_default().push((a, b));
            }
        }
    }
    let mut sums: Vec<_> = by_sum.into_iter().collect();
    sums.sort();
    for (_, pairs) in sums {
        for &(a1, a2) in &pairs {
            for &(b1, b2) in &pairs {
                if !refinable(t, [a1, a2, b1, b2]) {
                    return Some([a1, a2, b1, b2]);
                }
            }
        }
    }
    None
}

/// Elements whose meet with their supplement exists and is `0`.
pub fn sharp_oracle(t: &Table) -> Vec<usize> {
    let all = t.all();
    (0..t.n)
        .filter(|&a| t.meet_in(a, t.supplement(a), &all) == Some(t.zero))
        .collect()
}

/// Boolean-algebra identities on `members` under the order of `t`, with
/// meets and joins taken inside `members`.
pub fn boolean_oracle(t: &Table, members: &[usize]) -> Result<(), String> {
    let k = members.len();
    let pos = |a: usize| {
        members
            .iter()
            .position(|&x| x == a)
            .ok_or(format!("{a} outside"))
    };
    let mut meets = vec![0; k * k];
    let mut joins = vec![0; k * k];
    for (i, &a) in members.iter().enumerate() {
        for (j, &b) in members.iter().enumerate() {
            meets[i * k + j] = pos(t
                .meet_in(a, b, members)
                .ok_or(format!("no meet of {a}, {b}"))?)?;
            joins[i * k + j] = pos(t
                .join_in(a, b, members)
                .ok_or(format!("no join of {a}, {b}"))?)?;
        }
    }
    let comp: Vec<usize> = members
        .iter()
        .map(|&a| pos(t.supplement(a)))
        .collect::<Result<_, _>>()?;
    let (zero, one) = (pos(t.zero)?, pos(t.one)?);
    let meet = |i: usize, j: usize| meets[i * k + j];
    let join = |i: usize, j: usize| joins[i * k + j];
    for i in 0..k {
        if meet(i, comp[i]) != zero || join(i, comp[i]) != one {
            return Err(format!("{} not complemented by its supplement", members[i]));
        }
        for j in 0..k {
            if join(comp[i], comp[j]) != comp[meet(i, j)] {
                return Err(format!("De Morgan fails at {}, {}", members[i], members[j]));
            }
            for l in 0..k {
                if meet(i, join(j, l)) != join(meet(i, j), meet(i, l)) {
                    return Err(format!(
                        "distributivity fails at {}, {}, {}",
                        members[i], members[j], members[l]
                    ));
                }
            }
        }
    }
    Ok(())
}

enum Solved {
    Inconsistent,
    Unique(Vec<Q>),
    Underdetermined(usize),
}

/// Gauss-Jordan on `[rows | rhs]`.
fn solve(mut rows: Vec<Vec<Q>>, mut rhs: Vec<Q>, n: usize) -> Solved {
    let mut rank = 0;
    let mut pivots = vec![];
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        rhs.swap(rank, p);
        let inv = Q::one() / &rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        rhs[rank] *= &inv;
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let k = rows[r][col].clone();
                for (x, p) in rows[r].iter_mut().zip(&pivot) {
                    *x -= p * &k;
                }
                let v = &rhs[rank] * &k;
                rhs[r] -= v;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rhs[rank..].iter().any(|x| !x.is_zero()) {
        return Solved::Inconsistent;
    }
    if rank < n {
        return Solved::Underdetermined(rank);
    }
    let mut x = vec![Q::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rhs[r].clone();
    }
    Solved::Unique(x)
}

fn equalities(t: &Table) -> (Vec<Vec<Q>>, Vec<Q>) {
    let mut rows = vec![];
    let mut rhs = vec![];
    for a in 0..t.n {
        for b in a..t.n {
            if let Some(c) = t.add(a, b) {
                let mut r = vec![Q::zero(); t.n];
                r[a] += Q::one();
                r[b] += Q::one();
                r[c] -= Q::one();
                rows.push(r);
                rhs.push(Q::zero());
            }
        }
    }
    let mut r = vec![Q::zero(); t.n];
    r[t.one] = Q::one();
    rows.push(r);
    rhs.push(Q::one());
    (rows, rhs)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Vertices of `{s : additive, s(1) = 1, 0 ≤ s ≤ 1}` as basic solutions:
/// every way of pinning `n − rank` coordinates to `0` or `1` whose system
/// has a unique feasible solution. Sorted and deduplicated.
pub fn basic_solutions(t: &Table) -> Vec<Vec<Q>> {
    assert!(t.n <= 12, "oracle limited to 12 variables");
    let (rows, rhs) = equalities(t);
    let rank = match solve(rows.clone(), rhs.clone(), t.n) {
        Solved::Inconsistent => return vec![],
        Solved::Unique(x) => {
            let ok = x.iter().all(|v| !v.is_negative() && v <= &Q::one());
            return if ok { vec![x] } else { vec![] };
        }
        Solved::Underdetermined(r) => r,
    };
    let mut out = vec![];
    for pinned in combinations(t.n, t.n - rank) {
        for bits in 0..1u32 << pinned.len() {
            let mut rs = rows.clone();
            let mut bs = rhs.clone();
            for (i, &p) in pinned.iter().enumerate() {
                let mut r = vec![Q::zero(); t.n];
                r[p] = Q::one();
                rs.push(r);
                bs.push(if bits >> i & 1 == 1 {
                    Q::one()
                } else {
                    Q::zero()
                });
            }
            if let Solved::Unique(x) = solve(rs, bs, t.n) {
                if x.iter().all(|v| !v.is_negative() && v <= &Q::one()) {
                    out.push(x);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Zoo members small enough for [`basic_solutions`].
pub fn small_zoo() -> Vec<EffectAlgebra> {
    effecta::zoo::standard_zoo()
        .iter()
        .filter(|f| f.size() <= 12)
        .map(|f| generate(f, 64).unwrap())
        .collect()
}

pub fn zoo() -> Vec<(String, EffectAlgebra)> {
    effecta::zoo::standard_zoo()
        .iter()
        .map(|f| (f.to_string(), generate(f, 64).unwrap()))
        .collect()
}

/// Observables with up to three nonzero values summing to `1`, enumerated
/// from the raw table.
pub fn observables(m: &EffectAlgebra) -> Vec<Observable> {
    let t = Table::of(m);
    let e = Elem::from_index;
    let mut out = vec![make_observable(m, vec![Q::one()], vec![m.one()]).unwrap()];
    for a in (0..t.n).filter(|&a| a != t.zero) {
        let b = t.supplement(a);
        if b != t.zero {
            out.push(make_observable(m, vec![Q::zero(), Q::one()], vec![e(a), e(b)]).unwrap());
        }
        for b in (0..t.n).filter(|&b| b != t.zero) {
            let Some(ab) = t.add(a, b) else { continue };
            let c = t.supplement(ab);
            if c != t.zero {
                let support = vec![Q::zero(), q(1, 2), Q::one()];
                out.push(make_observable(m, support, vec![e(a), e(b), e(c)]).unwrap());
            }
        }
    }
    out
}
