//! Dense exact linear algebra over `Q`.

use num_traits::{One, Zero};

use crate::rational::Q;

/// Solution set `{ particular + Σ tⱼ · directions[j] }` of a linear system.
/// `free[j]` is the variable that `tⱼ` equals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub particular: Vec<Q>,
    pub directions: Vec<Vec<Q>>,
    pub free: Vec<usize>,
}

impl Affine {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn point(&self, params: &[Q]) -> Vec<Q> {
        let mut x = self.particular.clone();
        for (t, d) in params.iter().zip(&self.directions) {
            if t.is_zero() {
                continue;
            }
            for (xi, di) in x.iter_mut().zip(d) {
                *xi += t * di;
            }
        }
        x
    }
}

/// Reduced row echelon form in place; returns the pivot columns. Only the
/// first `cols` columns are eligible as pivots, so an augmented right-hand
/// side column rides along.
pub fn rref(m: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m = rows.to_vec();
    rref(&mut m, cols).len()
}

/// Solves `A x = b` for `x ∈ Qⁿ`; `None` if inconsistent.
pub fn solve_affine(a: &[Vec<Q>], b: &[Q], n: usize) -> Option<Affine> {
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, n);
    if m[pivots.len()..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut particular = vec![Q::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = m[r][n].clone();
    }
    let directions = free
        .iter()
        .map(|&f| {
            let mut d = vec![Q::zero(); n];
            d[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                d[p] = -m[r][f].clone();
            }
            d
        })
        .collect();
    Some(Affine {
        particular,
        directions,
        free,
    })
}

/// Unique solution of a square system, `None` if singular.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let sol = solve_affine(a, b, n)?;
    (sol.dim() == 0).then_some(sol.particular)
}
