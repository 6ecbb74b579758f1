//! Bundle models from singular hypersurfaces and double covers, the matrix
//! family degenerating in a given degree, and its quadric surface minor.
//!
//! A hypersurface of degree `d + 2` in `P^{n+r+1}` with multiplicity `d`
//! along `{x = 0}` is `sum_{i,j <= r} a_ij y_i y_j + 2 sum_k a_{k,r+1} y_k +
//! a_{r+1,r+1}` in the coordinates `x_0..x_n, y_0..y_r`; homogenizing in `y`
//! with a new slot `y_{r+1}` gives the symmetric matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::padding::family_type_degrees;
use super::types::{random_form, BundleMatrix, BundleType};
use super::BundleError;
use crate::cto::Family;
use crate::forms::HomogeneousForm;
use crate::rational::{int, Rational};
use crate::rng::SplitMix64;

/// `sum a_{ij} y_i y_j` over `indices`, with the last index as the
/// dehomogenized slot. The result lives on `P^{n+m}` with `m` new variables.
fn assemble(a: &BundleMatrix, indices: &[usize]) -> Result<HomogeneousForm, BundleError> {
    let n = a.bundle_type().n;
    let m = indices.len() - 1;
    let total = n + m;
    let y = |k: usize| HomogeneousForm::variable(total, n + 1 + k);
    let two = int(2);
    let last = indices[m];
    let mut f = a.entry(last, last).extend_vars(total);
    for (p, &i) in indices[..m].iter().enumerate() {
        let cross = a.entry(i, last).extend_vars(total).mul(&y(p))?.scale(&two);
        f = f.add(&cross)?;
        for (q, &j) in indices[..m].iter().enumerate().skip(p) {
            let coeff = if p == q { int(1) } else { two.clone() };
            let term = a.entry(i, j).extend_vars(total).mul(&y(p))?.mul(&y(q))?.scale(&coeff);
            f = f.add(&term)?;
        }
    }
    Ok(f)
}

/// Inverse of [`assemble`]: the `(m + 1) x (m + 1)` matrix of forms on `P^n`
/// read off from the `y`-expansion of `f`.
fn split_by_y(f: &HomogeneousForm, n: usize, m: usize) -> Result<Vec<Vec<HomogeneousForm>>, BundleError> {
    if f.ambient_dim() != n + m || f.degree() < 2 {
        return Err(BundleError::Shape(format!("expected a form of degree >= 2 on P^{}", n + m)));
    }
    let d = f.degree();
    let mut buckets: BTreeMap<(usize, usize), Vec<(Vec<u32>, Rational)>> = BTreeMap::new();
    let half = Rational::new(1.into(), 2.into());
    for (mono, c) in f.terms() {
        let e = mono.exponents();
        let ys: Vec<usize> = (0..m).flat_map(|k| std::iter::repeat(k).take(e[n + 1 + k] as usize)).collect();
        let (key, coeff) = match ys.as_slice() {
            [] => ((m, m), c.clone()),
            [k] => ((*k, m), c * &half),
            [i, j] if i == j => ((*i, *i), c.clone()),
            [i, j] => ((*i, *j), c * &half),
            _ => return Err(BundleError::HypothesisViolated("multiplicity along the plane is below d".into())),
        };
        buckets.entry(key).or_default().push((e[..=n].to_vec(), coeff));
    }
    let degree = |i: usize, j: usize| d - 2 + (i == m) as u32 + (j == m) as u32;
    (0..=m)
        .map(|i| {
            (i..=m)
                .map(|j| Ok(HomogeneousForm::from_terms(n, degree(i, j), buckets.remove(&(i, j)).unwrap_or_default())?))
                .collect()
        })
        .collect()
}

fn constant_type(n: usize, r: usize, head: u32, d: u32) -> Result<BundleType, BundleError> {
    let mut degrees = vec![d; r + 1];
    degrees.push(d + 2);
    degrees[0] = head;
    BundleType::new(n, r, degrees)
}

/// The hypersurface `f` on `P^{n+r+1}` of a matrix of type `(d, .., d, d+2)`.
pub fn reconstruct_hypersurface(a: &BundleMatrix) -> Result<HomogeneousForm, BundleError> {
    let indices: Vec<usize> = (0..a.size()).collect();
    assemble(a, &indices)
}

/// The matrix of type `(d, .., d, d+2)` of a hypersurface of degree `d + 2`
/// on `P^{n+r+1}` with multiplicity `d` along `{x_0 = .. = x_n = 0}`.
pub fn matrix_from_hypersurface(f: &HomogeneousForm, n: usize, r: usize) -> Result<BundleMatrix, BundleError> {
    let upper = split_by_y(f, n, r + 1)?;
    BundleMatrix::new(constant_type(n, r, f.degree() - 2, f.degree() - 2)?, upper)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypersurfaceModel {
    /// Degree `d + 2` on `P^{n+r+1}`, coordinates `x_0..x_n, y_0..y_r`.
    pub hypersurface: HomogeneousForm,
    pub matrix: BundleMatrix,
}

/// A random hypersurface of degree `d + 2` with multiplicity `d` along an
/// `r`-plane and its bundle matrix of type `(d, .., d, d + 2)`.
pub fn from_singular_hypersurface(n: usize, r: usize, d: u32, seed: u64) -> Result<HypersurfaceModel, BundleError> {
    if n == 0 || (r + 3) * (r + 2) / 2 <= n {
        return Err(BundleError::HypothesisViolated(format!("need C(r+3, 2) > n > 0, got n = {n}, r = {r}")));
    }
    let ty = constant_type(n, r, d, d)?;
    let vars: Vec<usize> = (0..=n).collect();
    let mut rng = SplitMix64::new(seed);
    let matrix = BundleMatrix::from_fn(ty.clone(), |i, j| random_form(n, ty.entry_degree(i, j), &vars, &mut rng))?;
    let hypersurface = reconstruct_hypersurface(&matrix)?;
    Ok(HypersurfaceModel { hypersurface, matrix })
}

/// The branch form `f` on `P^{n+r}` (coordinates `x_0..x_n, y_1..y_r`) of the
/// double cover `s^2 = f` given by a matrix with `a_00 = 1`, `a_i0 = 0`.
pub fn double_cover_branch(a: &BundleMatrix) -> Result<HomogeneousForm, BundleError> {
    check_double_cover_shape(a)?;
    let indices: Vec<usize> = (1..a.size()).collect();
    Ok(assemble(a, &indices)?.neg())
}

/// Inverse of [`double_cover_branch`].
pub fn matrix_from_branch(f: &HomogeneousForm, n: usize, r: usize) -> Result<BundleMatrix, BundleError> {
    let inner = split_by_y(&f.neg(), n, r)?;
    let d = f.degree() - 2;
    let ty = constant_type(n, r, 0, d)?;
    BundleMatrix::from_fn(ty.clone(), |i, j| match (i, j) {
        (0, 0) => HomogeneousForm::one(n),
        (0, j) => HomogeneousForm::zero(n, ty.entry_degree(0, j)),
        (i, j) => inner[i - 1][j - i].clone(),
    })
}

fn check_double_cover_shape(a: &BundleMatrix) -> Result<(), BundleError> {
    let n = a.bundle_type().n;
    if *a.entry(0, 0) != HomogeneousForm::one(n) || (1..a.size()).any(|i| !a.entry(i, 0).is_zero()) {
        return Err(BundleError::Shape("double cover matrices need a_00 = 1 and a_i0 = 0".into()));
    }
    Ok(())
}

/// A random matrix of type `(0, d, .., d, d + 2)` with `a_00 = 1` and
/// `a_i0 = 0`, i.e. a double cover branched along a form of degree `d + 2`
/// with multiplicity `d` along an `(r - 1)`-plane.
pub fn from_double_cover(n: usize, r: usize, d: u32, seed: u64) -> Result<BundleMatrix, BundleError> {
    if d % 2 != 0 {
        return Err(BundleError::ParityViolated(d));
    }
    if n == 0 || r == 0 {
        return Err(BundleError::Shape("n and r must be positive".into()));
    }
    let ty = constant_type(n, r, 0, d)?;
    let vars: Vec<usize> = (0..=n).collect();
    let mut rng = SplitMix64::new(seed);
    BundleMatrix::from_fn(ty.clone(), |i, j| match (i, j) {
        (0, 0) => HomogeneousForm::one(n),
        (0, j) => HomogeneousForm::zero(n, ty.entry_degree(0, j)),
        (i, j) => random_form(n, ty.entry_degree(i, j), &vars, &mut rng),
    })
}

/// Rows and columns `{0, 1, 2, n}` of the family matrix.
fn minor_indices(n: usize) -> [usize; 4] {
    [0, 1, 2, n]
}

/// A random member of the family of bundles of type `(m_0, .., m_r,
/// d - sum m_i)` degenerating in degree `d`. Entries indexed by
/// `{0, 1, 2, n}` use `x_0, x_1, x_2` only, and for even `d` with `n >= 3`
/// the first column of that minor vanishes off the diagonal.
pub fn family_matrix(n: usize, r: usize, d: u64, seed: u64) -> Result<(Family, BundleMatrix), BundleError> {
    let bound = 2 * (n + r) as u64 * (r + 2) as u64;
    if d < bound {
        return Err(BundleError::HypothesisViolated(format!("need d >= 2(n + r)(r + 2) = {bound}, got {d}")));
    }
    if r % 2 == 0 && d % 2 == 1 {
        return Err(BundleError::HypothesisViolated("d must be even when r is even".into()));
    }
    let (family, degrees) = family_type_degrees(n, r, d)?;
    let ty = BundleType::new(n, r, degrees)?;
    let small = if n >= 3 && n <= r + 1 { minor_indices(n).to_vec() } else { Vec::new() };
    let all: Vec<usize> = (0..=n).collect();
    let plane = [0, 1, 2];
    let mut rng = SplitMix64::new(seed);
    let matrix = BundleMatrix::from_fn(ty.clone(), |i, j| {
        let degree = ty.entry_degree(i, j);
        let in_minor = small.contains(&i) && small.contains(&j);
        if in_minor && d % 2 == 0 && i == 0 && j != 0 {
            HomogeneousForm::zero(n, degree)
        } else if in_minor {
            random_form(n, degree, &plane, &mut rng)
        } else {
            random_form(n, degree, &all, &mut rng)
        }
    })?;
    Ok((family, matrix))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMinor {
    pub matrix: BundleMatrix,
    /// The induced type is `(0, 2, 2, 4)`.
    pub is_0224: bool,
}

/// The `4 x 4` minor on rows and columns `{0, 1, 2, n}`.
pub fn minor_surface_bundle(a: &BundleMatrix, n: usize) -> Result<SurfaceMinor, BundleError> {
    let r = a.bundle_type().r;
    if n < 3 || r + 2 <= n {
        return Err(BundleError::IndexError(format!("need r + 2 > n >= 3, got n = {n}, r = {r}")));
    }
    let matrix = a.principal_minor(&minor_indices(n))?;
    let is_0224 = matrix.bundle_type().degrees == [0, 2, 2, 4];
    Ok(SurfaceMinor { matrix, is_0224 })
}
