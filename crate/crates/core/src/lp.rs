//! Dense two-phase simplex over `Q` with Bland's rule.
//!
//! Solves `max c·x` subject to `A x ≤ b`, `x ≥ 0`. Phase one uses a single
//! auxiliary variable entering on the most violated row. Bland's rule makes
//! cycling impossible, and exact arithmetic makes the optimum certifiable.

use num_traits::{Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Q> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    obj: Vec<Q>,
    obj_const: Q,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Q {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pr = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pr) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for (x, p) in self.obj.iter_mut().zip(&pr[..self.width]) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.obj_const += &f * &pr[self.width];
        }
        self.basis[r] = c;
    }

    /// Installs `cost` as objective, expressed over the current nonbasics.
    fn set_objective(&mut self, cost: &[Q]) {
        self.obj = cost.to_vec();
        self.obj_const = Q::zero();
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if self.obj[b].is_zero() {
                continue;
            }
            let f = self.obj[b].clone();
            for (x, p) in self.obj.iter_mut().zip(&self.rows[r][..self.width]) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
            self.obj_const += &f * &self.rows[r][self.width];
        }
    }

    /// Runs to optimality; `false` if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c);
        }
    }
}

pub fn maximize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    // columns: x (n), slacks (m), auxiliary (1)
    let width = n + m + 1;
    let aux = n + m;
    let rows: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let mut r = vec![Q::zero(); width + 1];
            r[..n].clone_from_slice(&a[i]);
            r[n + i] = Q::from_integer(1.into());
            r[aux] = Q::from_integer((-1).into());
            r[width] = b[i].clone();
            r
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        obj: vec![Q::zero(); width],
        obj_const: Q::zero(),
        width,
    };

    let worst = (0..m)
        .filter(|&i| b[i].is_negative())
        .min_by(|&i, &j| b[i].cmp(&b[j]));
    if let Some(r) = worst {
        let mut cost = vec![Q::zero(); width];
        cost[aux] = Q::from_integer((-1).into());
        t.set_objective(&cost);
        t.pivot(r, aux);
        t.optimize(width);
        if t.obj_const.is_negative() {
            return LpOutcome::Infeasible;
        }
        if let Some(r) = t.basis.iter().position(|&v| v == aux) {
            match (0..aux).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        }
    }
    for row in t.rows.iter_mut() {
        row[aux] = Q::zero();
    }
    let mut cost = vec![Q::zero(); width];
    cost[..n].clone_from_slice(c);
    t.set_objective(&cost);
    if !t.optimize(aux) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for (r, &v) in t.basis.iter().enumerate() {
        if v < n {
            x[v] = t.rhs(r).clone();
        }
    }
    LpOutcome::Optimal {
        value: t.obj_const.clone(),
        x,
    }
}

/// Like [`maximize`] but with sign-unrestricted variables.
pub fn maximize_free(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> LpOutcome {
    let split = |v: &[Q]| -> Vec<Q> {
        v.iter()
            .cloned()
            .chain(v.iter().map(|x| -x.clone()))
            .collect()
    };
    let a2: Vec<Vec<Q>> = a.iter().map(|r| split(r)).collect();
    match maximize(&split(c), &a2, b) {
        LpOutcome::Optimal { value, x } => {
            let n = c.len();
            let x = (0..n).map(|i| &x[i] - &x[n + i]).collect();
            LpOutcome::Optimal { value, x }
        }
        other => other,
    }
}
