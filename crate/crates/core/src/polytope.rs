//! Exact vertex enumeration for bounded polytopes `{ t : c + G t ≥ 0 }`.
//!
//! The default path is an incremental double-description method on the
//! homogenized cone `{ (λ, t) : λ c + G t ≥ 0, λ ≥ 0 }`. Adjacency of rays
//! uses the combinatorial test on zero sets. A brute-force enumeration of
//! all `d`-subsets of constraints is kept for small systems.

use num_traits::{One, Signed, Zero};

use crate::linalg::{rank, solve_square};
use crate::par::{self, Exec};
use crate::rational::{lex_cmp, Q};

/// Rows `constant[i] + coeffs[i] · t ≥ 0` over `t ∈ Q^dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpaces {
    pub dim: usize,
    pub constant: Vec<Q>,
    pub coeffs: Vec<Vec<Q>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VertexMethod {
    /// Brute force when at most [`BRUTE_FORCE_LIMIT`] bases exist, else DD.
    #[default]
    Auto,
    DoubleDescription,
    BruteForce,
}

pub const BRUTE_FORCE_LIMIT: u128 = 256;

impl HalfSpaces {
    pub fn new(dim: usize) -> Self {
        HalfSpaces {
            dim,
            constant: vec![],
            coeffs: vec![],
        }
    }

    pub fn push(&mut self, constant: Q, coeffs: Vec<Q>) {
        debug_assert_eq!(coeffs.len(), self.dim);
        self.constant.push(constant);
        self.coeffs.push(coeffs);
    }

    pub fn len(&self) -> usize {
        self.constant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constant.is_empty()
    }

    pub fn value(&self, row: usize, t: &[Q]) -> Q {
        let mut v = self.constant[row].clone();
        for (g, x) in self.coeffs[row].iter().zip(t) {
            if !g.is_zero() {
                v += g * x;
            }
        }
        v
    }

    pub fn contains(&self, t: &[Q]) -> bool {
        (0..self.len()).all(|i| !self.value(i, t).is_negative())
    }

    /// Removes duplicate rows and rows with zero coefficients. Returns
    /// `None` if a constant row is violated (the polytope is empty).
    fn normalized(&self) -> Option<HalfSpaces> {
        let mut out = HalfSpaces::new(self.dim);
        let mut seen: Vec<Vec<Q>> = vec![];
        for (c, g) in self.constant.iter().zip(&self.coeffs) {
            if g.iter().all(Q::is_zero) {
                if c.is_negative() {
                    return None;
                }
                continue;
            }
            let mut row = Vec::with_capacity(self.dim + 1);
            row.push(c.clone());
            row.extend(g.iter().cloned());
            let scale = row.iter().find(|x| !x.is_zero()).map(|x| x.abs()).unwrap();
            for x in row.iter_mut() {
                *x /= &scale;
            }
            if !seen.contains(&row) {
                seen.push(row);
                out.push(c / &scale, g.iter().map(|x| x / &scale).collect());
            }
        }
        Some(out)
    }
}

/// All vertices, deduplicated and sorted lexicographically. The polytope
/// must be bounded.
pub fn vertices(h: &HalfSpaces, method: VertexMethod, exec: Exec) -> Vec<Vec<Q>> {
    let Some(h) = h.normalized() else {
        return vec![];
    };
    if h.dim == 0 {
        return vec![vec![]];
    }
    let method = match method {
        VertexMethod::Auto if binomial(h.len() as u128, h.dim as u128) <= BRUTE_FORCE_LIMIT => {
            VertexMethod::BruteForce
        }
        VertexMethod::Auto => VertexMethod::DoubleDescription,
        m => m,
    };
    let mut vs = match method {
        VertexMethod::BruteForce => brute_force(&h, exec),
        _ => double_description(&h, exec),
    };
    vs.sort_by(|a, b| lex_cmp(a, b));
    vs.dedup();
    vs
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn brute_force(h: &HalfSpaces, exec: Exec) -> Vec<Vec<Q>> {
    let subsets = combinations(h.len(), h.dim);
    let found = par::map(exec, &subsets, |rows| {
        let a: Vec<Vec<Q>> = rows.iter().map(|&r| h.coeffs[r].clone()).collect();
        let b: Vec<Q> = rows.iter().map(|&r| -h.constant[r].clone()).collect();
        solve_square(&a, &b).filter(|t| h.contains(t))
    });
    found.into_iter().flatten().collect()
}

#[derive(Clone, Debug)]
struct Ray {
    coords: Vec<Q>,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

fn normalize(v: &mut [Q]) {
    if let Some(s) = v.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
        if !s.is_one() {
            for x in v.iter_mut() {
                *x /= &s;
            }
        }
    }
}

fn double_description(h: &HalfSpaces, exec: Exec) -> Vec<Vec<Q>> {
    let d = h.dim + 1;
    // homogenized rows; row 0 is λ ≥ 0
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(h.len() + 1);
    let mut lambda = vec![Q::zero(); d];
    lambda[0] = Q::one();
    rows.push(lambda);
    for (c, g) in h.constant.iter().zip(&h.coeffs) {
        let mut r = vec![c.clone()];
        r.extend(g.iter().cloned());
        rows.push(r);
    }
    let words = rows.len().div_ceil(64);

    // initial simplicial cone from d independent rows
    let mut basis: Vec<usize> = vec![];
    for i in 0..rows.len() {
        let mut cand: Vec<Vec<Q>> = basis.iter().map(|&j| rows[j].clone()).collect();
        cand.push(rows[i].clone());
        if rank(&cand) == cand.len() {
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    assert_eq!(basis.len(), d, "polytope is unbounded");
    let bmat: Vec<Vec<Q>> = basis.iter().map(|&j| rows[j].clone()).collect();
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let mut e = vec![Q::zero(); d];
            e[j] = Q::one();
            let mut coords = solve_square(&bmat, &e).expect("independent rows");
            normalize(&mut coords);
            let mut zeros = vec![0u64; words];
            for (k, &r) in basis.iter().enumerate() {
                if k != j {
                    bit_set(&mut zeros, r);
                }
            }
            Ray { coords, zeros }
        })
        .collect();
    let mut processed = vec![false; rows.len()];
    for &b in &basis {
        processed[b] = true;
    }

    for k in 0..rows.len() {
        if processed[k] {
            continue;
        }
        processed[k] = true;
        let vals: Vec<Q> = par::map(exec, &rays, |r| dot(&rows[k], &r.coords));
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    bit_set(&mut r.zeros, k);
                }
            }
            continue;
        }
        let min_common = d.saturating_sub(2);
        let created: Vec<Vec<Ray>> = par::map(exec, &pos, |&p| {
            let mut out = vec![];
            for &q in &neg {
                let common: Vec<u64> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[q].zeros)
                    .map(|(a, b)| a & b)
                    .collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) < min_common {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(i, r)| i == p || i == q || !subset(&common, &r.zeros));
                if !adjacent {
                    continue;
                }
                let (vp, vq) = (&vals[p], &vals[q]);
                let mut coords: Vec<Q> = rays[q]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(xq, xp)| vp * xq - vq * xp)
                    .collect();
                normalize(&mut coords);
                let mut zeros = common;
                bit_set(&mut zeros, k);
                out.push(Ray { coords, zeros });
            }
            out
        });
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                bit_set(&mut r.zeros, k);
            }
            next.push(r);
        }
        next.extend(created.into_iter().flatten());
        rays = next;
        if rays.is_empty() {
            return vec![];
        }
    }

    rays.into_iter()
        .filter(|r| r.coords[0].is_positive())
        .map(|r| {
            let l = r.coords[0].clone();
            r.coords[1..].iter().map(|x| x / &l).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn cube(dim: usize) -> HalfSpaces {
        let mut h = HalfSpaces::new(dim);
        for i in 0..dim {
            let mut g = vec![qi(0); dim];
            g[i] = qi(1);
            h.push(qi(0), g.clone());
            g[i] = qi(-1);
            h.push(qi(1), g);
        }
        h
    }

    #[test]
    fn cube_vertices() {
        for method in [VertexMethod::DoubleDescription, VertexMethod::BruteForce] {
            let vs = vertices(&cube(3), method, Exec::Sequential);
            assert_eq!(vs.len(), 8, "{method:?}");
            assert_eq!(vs[0], vec![qi(0), qi(0), qi(0)]);
            assert_eq!(vs[7], vec![qi(1), qi(1), qi(1)]);
        }
    }

    #[test]
    fn triangle_with_redundant_rows() {
        // x >= 0, y >= 0, x + y <= 1, plus x <= 2 and a duplicate
        let mut h = HalfSpaces::new(2);
        h.push(qi(0), vec![qi(1), qi(0)]);
        h.push(qi(0), vec![qi(0), qi(1)]);
        h.push(qi(1), vec![qi(-1), qi(-1)]);
        h.push(qi(2), vec![qi(-1), qi(0)]);
        h.push(qi(0), vec![qi(2), qi(0)]);
        let dd = vertices(&h, VertexMethod::DoubleDescription, Exec::Parallel);
        let bf = vertices(&h, VertexMethod::BruteForce, Exec::Parallel);
        assert_eq!(dd, bf);
        assert_eq!(
            dd,
            vec![vec![qi(0), qi(0)], vec![qi(0), qi(1)], vec![qi(1), qi(0)]]
        );
    }

    #[test]
    fn empty_and_point() {
        let mut h = HalfSpaces::new(1);
        h.push(qi(0), vec![qi(1)]);
        h.push(qi(-1), vec![qi(-1)]);
        assert!(vertices(&h, VertexMethod::DoubleDescription, Exec::Sequential).is_empty());
        assert!(vertices(&h, VertexMethod::BruteForce, Exec::Sequential).is_empty());
        let mut h = HalfSpaces::new(1);
        h.push(q(-1, 3), vec![qi(1)]);
        h.push(q(1, 3), vec![qi(-1)]);
        assert_eq!(
            vertices(&h, VertexMethod::DoubleDescription, Exec::Sequential),
            vec![vec![q(1, 3)]]
        );
        let h0 = HalfSpaces::new(0);
        assert_eq!(
            vertices(&h0, VertexMethod::Auto, Exec::Sequential),
            vec![Vec::<Q>::new()]
        );
    }

    #[test]
    fn simplex_in_five_dims() {
        // t_i >= 0, sum t_i <= 1
        let d = 5;
        let mut h = HalfSpaces::new(d);
        for i in 0..d {
            let mut g = vec![qi(0); d];
            g[i] = qi(1);
            h.push(qi(0), g);
        }
        h.push(qi(1), vec![qi(-1); d]);
        let dd = vertices(&h, VertexMethod::DoubleDescription, Exec::Parallel);
        assert_eq!(dd.len(), d + 1);
        assert_eq!(dd, vertices(&h, VertexMethod::BruteForce, Exec::Sequential));
    }
}
