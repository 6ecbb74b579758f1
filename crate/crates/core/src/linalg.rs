//! Dense exact linear algebra over `Q`.
//!
//! Rank and determinant go through fraction-free (Bareiss) elimination on
//! integer rows; inverses, kernels and diagonalization use rational
//! Gauss-Jordan. All matrices here are tiny (at most a few dozen rows).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::{lcm_of_denominators, Rational};

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(size: usize) -> Matrix {
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

fn to_integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = lcm_of_denominators(row.iter());
            row.iter()
                .map(|x| (x * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Fraction-free elimination. Returns `(rank, sign * det-ish)` where the second
/// component is the last pivot (the determinant for a full-rank square input,
/// up to the row-scaling applied by the caller).
fn bareiss(mut a: Vec<Vec<BigInt>>) -> (usize, BigInt, bool) {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut negate = false;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            negate = !negate;
        }
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    (rank, prev, negate)
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    bareiss(to_integer_rows(m)).0
}

pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let size = m.len();
    if size == 0 {
        return Rational::one();
    }
    let scales: Vec<BigInt> = m.iter().map(|row| lcm_of_denominators(row.iter())).collect();
    let (rank, last, negate) = bareiss(to_integer_rows(m));
    if rank < size {
        return Rational::zero();
    }
    let scale = scales.iter().fold(BigInt::one(), |acc, s| acc * s);
    let det = Rational::new(last, scale);
    if negate {
        -det
    } else {
        det
    }
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{v : m v = 0}` for an `rows x cols` matrix.
pub fn kernel(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a: Matrix = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(m: &[Vec<Rational>]) -> Option<Matrix> {
    let size = m.len();
    let mut aug: Matrix = m
        .iter()
        .zip(identity(size))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < size || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[size..].to_vec()).collect())
}

pub fn mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Rational>]) -> Matrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + x * y))
        .collect()
}

/// Writes a symmetric Gram matrix `G` as `x^T G x = sum_k d_k (w_k . x)^2`
/// with linearly independent rational vectors `w_k`. The number of pieces is
/// the rank of `G`.
pub fn diagonalize_symmetric(g: &[Vec<Rational>]) -> Vec<(Rational, Vec<Rational>)> {
    let size = g.len();
    let mut g: Matrix = g.to_vec();
    let mut out = Vec::new();
    loop {
        // Pick u with u^T G u != 0: a basis vector if the diagonal allows,
        // otherwise e_i + e_j for a nonzero off-diagonal entry.
        let mut u = None;
        if let Some(i) = (0..size).find(|&i| !g[i][i].is_zero()) {
            let mut v = vec![Rational::zero(); size];
            v[i] = Rational::one();
            u = Some(v);
        } else {
            'outer: for i in 0..size {
                for j in i + 1..size {
                    if !g[i][j].is_zero() {
                        let mut v = vec![Rational::zero(); size];
                        v[i] = Rational::one();
                        v[j] = Rational::one();
                        u = Some(v);
                        break 'outer;
                    }
                }
            }
        }
        let Some(u) = u else { break };
        let w = mat_vec(&g, &u);
        let a = u.iter().zip(&w).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
        debug_assert!(!a.is_zero());
        let inv = a.recip();
        for i in 0..size {
            for j in 0..size {
                let t = &w[i] * &w[j] * &inv;
                g[i][j] -= t;
            }
        }
        out.push((inv, w));
    }
    out
}
