//! Sparse homogeneous forms over `Q` in variables `x0..xn`.
//!
//! A form always knows its ambient dimension `n` and its degree, including
//! the zero form, so degree checks never have to special-case zero.

mod affine;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, Matrix};
use crate::rational::{int, Rational};

pub use affine::AffinePolynomial;
pub use text::FormRecord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("linear change of variables is singular")]
    SingularChange,
    #[error("linear form is zero")]
    ZeroLinearForm,
    #[error("expected a form of degree {expected}, found degree {found}")]
    WrongDegree { expected: u32, found: u32 },
    #[error("cannot restrict a form on P^0 to a hyperplane")]
    NoHyperplane,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Exponent vector of length `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    pub fn variable(n: usize, index: usize) -> Self {
        let mut e = vec![0; n + 1];
        e[index] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len() - 1
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousForm {
    n: usize,
    degree: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl HomogeneousForm {
    pub fn zero(n: usize, degree: u32) -> Self {
        Self { n, degree, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut f = Self::zero(n, 0);
        f.insert(Monomial::one(n), c);
        f
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, Rational::one())
    }

    pub fn variable(n: usize, index: usize) -> Self {
        assert!(index <= n, "variable x{index} outside P^{n}");
        let mut f = Self::zero(n, 1);
        f.insert(Monomial::variable(n, index), Rational::one());
        f
    }

    /// `sum_i coeffs[i] * x_i`; the ambient dimension is `coeffs.len() - 1`.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len() - 1;
        let mut f = Self::zero(n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            f.insert(Monomial::variable(n, i), c.clone());
        }
        f
    }

    pub fn linear_i64(coeffs: &[i64]) -> Self {
        Self::linear(&coeffs.iter().map(|&c| int(c)).collect::<Vec<_>>())
    }

    /// Builds a form from `(exponents, coefficient)` pairs; repeated monomials
    /// are summed.
    pub fn from_terms(
        n: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self, FormError> {
        let mut f = Self::zero(n, degree);
        for (e, c) in terms {
            if e.len() != n + 1 {
                return Err(FormError::DimMismatch { left: n, right: e.len().saturating_sub(1) });
            }
            let m = Monomial(e);
            if m.degree() != degree {
                return Err(FormError::WrongDegree { expected: degree, found: m.degree() });
            }
            f.insert(m, c);
        }
        Ok(f)
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient vector of a linear form.
    pub fn linear_coefficients(&self) -> Result<Vec<Rational>, FormError> {
        self.expect_degree(1)?;
        Ok((0..=self.n).map(|i| self.coefficient(&Monomial::variable(self.n, i))).collect())
    }

    /// Indices of variables that occur with positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..=self.n)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn expect_degree(&self, expected: u32) -> Result<(), FormError> {
        if self.degree == expected {
            Ok(())
        } else {
            Err(FormError::WrongDegree { expected, found: self.degree })
        }
    }

    fn same_dim(&self, other: &Self) -> Result<(), FormError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(FormError::DimMismatch { left: self.n, right: other.n })
        }
    }

    fn same_shape(&self, other: &Self) -> Result<(), FormError> {
        self.same_dim(other)?;
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.degree);
        }
        Self {
            n: self.n,
            degree: self.degree,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, FormError> {
        self.same_dim(other)?;
        let mut out = Self::zero(self.n, self.degree + other.degree);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base).expect("same ambient");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same ambient");
            }
        }
        out
    }

    /// Product of a nonempty or empty list (empty gives `1`).
    pub fn product<'a>(n: usize, it: impl IntoIterator<Item = &'a Self>) -> Result<Self, FormError> {
        it.into_iter().try_fold(Self::one(n), |acc, f| acc.mul(f))
    }

    /// Replaces `x_i` by `images[i]`. All images must share one ambient
    /// dimension and one degree `e`; the result has degree `deg * e`.
    pub fn compose(&self, images: &[Self]) -> Result<Self, FormError> {
        if images.len() != self.n + 1 {
            return Err(FormError::DimMismatch { left: self.n, right: images.len().saturating_sub(1) });
        }
        let target = &images[0];
        for img in images {
            target.same_shape(img)?;
        }
        let m = target.n;
        let mut out = Self::zero(m, self.degree * target.degree);
        // powers[i][k] = images[i]^k, filled lazily up to the largest exponent.
        let mut powers: Vec<Vec<Self>> = images.iter().map(|img| vec![Self::one(m), img.clone()]).collect();
        for mono in self.terms.keys() {
            for (i, &e) in mono.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&images[i])?;
                    powers[i].push(next);
                }
            }
        }
        for (mono, c) in &self.terms {
            let mut term = Self::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize])?;
                }
            }
            for (tm, tc) in term.terms {
                out.insert(tm, tc);
            }
        }
        Ok(out)
    }

    /// `f(T x)`: each `x_i` becomes `sum_j T[i][j] x_j`.
    pub fn substitute(&self, change: &LinearChange) -> Result<Self, FormError> {
        if change.size() != self.n + 1 {
            return Err(FormError::DimMismatch { left: self.n, right: change.size() - 1 });
        }
        let images: Vec<Self> = change.matrix.iter().map(|row| Self::linear(row)).collect();
        self.compose(&images)
    }

    /// Highest-index variable with a nonzero coefficient in a linear form.
    pub fn pivot(&self) -> Result<usize, FormError> {
        self.expect_degree(1)?;
        self.terms
            .keys()
            .map(|m| m.0.iter().position(|&e| e == 1).unwrap())
            .max()
            .ok_or(FormError::ZeroLinearForm)
    }

    /// Images of `x_0..x_n` in `P^{n-1}` under `ell = 0`: the pivot variable
    /// is solved for and the remaining variables are renumbered in order.
    fn hyperplane_images(ell: &Self) -> Result<(usize, Vec<Self>), FormError> {
        let p = ell.pivot()?;
        let n = ell.n;
        if n == 0 {
            return Err(FormError::NoHyperplane);
        }
        let coeffs = ell.linear_coefficients()?;
        let inv = coeffs[p].recip();
        let images = (0..=n)
            .map(|i| {
                if i == p {
                    let solved: Vec<Rational> = (0..=n)
                        .filter(|&j| j != p)
                        .map(|j| -&coeffs[j] * &inv)
                        .collect();
                    Self::linear(&solved)
                } else {
                    Self::variable(n - 1, if i < p { i } else { i - 1 })
                }
            })
            .collect();
        Ok((p, images))
    }

    /// Restriction to `{ell = 0}` as a form on `P^{n-1}`.
    pub fn restrict_to_hyperplane(&self, ell: &Self) -> Result<Self, FormError> {
        self.same_dim(ell)?;
        let (_, images) = Self::hyperplane_images(ell)?;
        self.compose(&images)
    }

    /// Exact division by a linear form. `Ok(None)` when `ell` does not divide.
    pub fn divide_by_linear(&self, ell: &Self) -> Result<Option<Self>, FormError> {
        self.same_dim(ell)?;
        let p = ell.pivot()?;
        if self.is_zero() {
            return Ok(Some(Self::zero(self.n, self.degree.saturating_sub(1))));
        }
        if self.degree == 0 {
            return Ok(None);
        }
        // Synthetic division in x_p: write f = sum_k f_k x_p^k and peel off the
        // top x_p-degree, which must be divisible by the pivot coefficient.
        let coeffs = ell.linear_coefficients()?;
        let lead_inv = coeffs[p].recip();
        let rest = {
            let mut r = coeffs.clone();
            r[p] = Rational::zero();
            Self::linear(&r)
        };
        let xp = Self::variable(self.n, p);
        let mut remainder = self.clone();
        let mut quotient = Self::zero(self.n, self.degree - 1);
        loop {
            let top = remainder.terms.keys().map(|m| m.0[p]).max();
            let Some(top) = top.filter(|&k| k > 0) else { break };
            // q_part = (terms of remainder with x_p^top) / (c_p x_p)
            let mut q_part = Self::zero(self.n, self.degree - 1);
            for (m, c) in remainder.terms.iter().filter(|(m, _)| m.0[p] == top) {
                let mut e = m.0.clone();
                e[p] -= 1;
                q_part.insert(Monomial(e), c * &lead_inv);
            }
            let sub = q_part.mul(&xp.scale(&coeffs[p]))?.add(&q_part.mul(&rest)?)?;
            remainder = remainder.sub(&sub)?;
            quotient = quotient.add(&q_part)?;
        }
        Ok(remainder.is_zero().then_some(quotient))
    }

    /// Symmetric Gram matrix `G` with `f = x^T G x`.
    pub fn gram_matrix(&self) -> Result<Matrix, FormError> {
        self.expect_degree(2)?;
        let size = self.n + 1;
        let mut g = vec![vec![Rational::zero(); size]; size];
        let half = Rational::new(1.into(), 2.into());
        for (m, c) in &self.terms {
            let idx: Vec<usize> = m.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect();
            let (i, j) = (idx[0], idx[1]);
            if i == j {
                g[i][i] = c.clone();
            } else {
                g[i][j] = c * &half;
                g[j][i] = c * &half;
            }
        }
        Ok(g)
    }

    /// Inverse of [`gram_matrix`](Self::gram_matrix).
    pub fn from_gram(g: &[Vec<Rational>]) -> Self {
        let n = g.len() - 1;
        let mut f = Self::zero(n, 2);
        for i in 0..=n {
            for j in i..=n {
                let c = if i == j { g[i][i].clone() } else { &g[i][j] + &g[j][i] };
                let mut e = vec![0; n + 1];
                e[i] += 1;
                e[j] += 1;
                f.insert(Monomial(e), c);
            }
        }
        f
    }

    pub fn quadric_rank(&self) -> Result<usize, FormError> {
        Ok(linalg::rank(&self.gram_matrix()?))
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.n, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e > 0 {
                let mut d = m.0.clone();
                d[var] -= 1;
                out.insert(Monomial(d), c * int(e as i64));
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.n + 1);
        self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            let v = m.0.iter().zip(point).fold(c.clone(), |v, (&e, x)| v * num_traits::pow(x.clone(), e as usize));
            acc + v
        })
    }

    /// The same polynomial viewed in `P^{new_n}` with extra trailing variables.
    pub fn extend_vars(&self, new_n: usize) -> Self {
        assert!(new_n >= self.n);
        Self {
            n: new_n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(new_n + 1, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Coefficient of the lexicographically largest monomial.
    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next_back()
    }

    /// `(lc, f / lc)`; the zero form is returned unchanged with `lc = 1`.
    pub fn normalized(&self) -> (Rational, Self) {
        match self.leading_coefficient() {
            None => (Rational::one(), self.clone()),
            Some(lc) => (lc.clone(), self.scale(&lc.recip())),
        }
    }

    pub fn is_proportional(&self, other: &Self) -> bool {
        self.n == other.n && self.degree == other.degree && self.normalized().1 == other.normalized().1
    }

    pub fn dehomogenize(&self, var: usize) -> AffinePolynomial {
        AffinePolynomial::from_form(self, var)
    }
}

/// Invertible `(n+1) x (n+1)` rational matrix acting by `x -> M x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearChange {
    matrix: Matrix,
}

impl LinearChange {
    pub fn new(matrix: Matrix) -> Result<Self, FormError> {
        if matrix.iter().any(|row| row.len() != matrix.len()) || linalg::determinant(&matrix).is_zero() {
            return Err(FormError::SingularChange);
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: linalg::identity(n + 1) }
    }

    /// Exchanges `x_a` and `x_b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut m = linalg::identity(n + 1);
        m.swap(a, b);
        Self { matrix: m }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: linalg::inverse(&self.matrix).expect("checked invertible") }
    }
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self))
    }
}

/// Exponent vectors of all monomials of `degree` in `x0..xn`, lex-descending.
pub fn all_monomials(n: usize, degree: u32) -> Vec<Vec<u32>> {
    fn rec(vars: usize, degree: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if vars == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            rec(vars - 1, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n + 1, degree, &mut Vec::new(), &mut out);
    out
}
