use serde::{Deserialize, Serialize};

use super::BundleError;
use crate::forms::{all_monomials, HomogeneousForm};
use crate::rational::Rational;
use crate::rng::SplitMix64;

/// Degrees `d_i = 2 l_i + l` of a quadric bundle over `P^n` with fibres of
/// dimension `r`; there are `r + 2` of them. The twist `l` is normalized to
/// the common parity of the `d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleType {
    pub n: usize,
    pub r: usize,
    pub degrees: Vec<u32>,
}

impl BundleType {
    pub fn new(n: usize, r: usize, degrees: Vec<u32>) -> Result<Self, BundleError> {
        if n == 0 || r == 0 {
            return Err(BundleError::Shape(format!("n and r must be positive, got n = {n}, r = {r}")));
        }
        if degrees.len() != r + 2 {
            return Err(BundleError::Shape(format!("expected {} degrees, got {}", r + 2, degrees.len())));
        }
        if degrees.iter().any(|d| d % 2 != degrees[0] % 2) {
            return Err(BundleError::ParityMismatch(format!("degrees {degrees:?} have mixed parity")));
        }
        Ok(Self { n, r, degrees })
    }

    pub fn size(&self) -> usize {
        self.r + 2
    }

    pub fn twist(&self) -> u32 {
        self.degrees[0] % 2
    }

    pub fn twists(&self) -> Vec<u32> {
        let l = self.twist();
        self.degrees.iter().map(|d| (d - l) / 2).collect()
    }

    /// `|a_ij| = l_i + l_j + l = (d_i + d_j) / 2`.
    pub fn entry_degree(&self, i: usize, j: usize) -> u32 {
        (self.degrees[i] + self.degrees[j]) / 2
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Whether a quadric bundle of type `degrees` over `P^n` exists: the degrees
/// share one parity and either `C(r+3, 2) > n` or some `d_i = 0`.
pub fn exists_type(n: usize, r: usize, degrees: &[u32]) -> bool {
    degrees.len() == r + 2
        && degrees.iter().all(|d| d % 2 == degrees[0] % 2)
        && (binomial(r as u64 + 3, 2) > n as u64 || degrees.contains(&0))
}

/// Symmetric matrix `(a_ij)` of forms on `P^n` with `|a_ij| = (d_i + d_j)/2`;
/// locally the bundle is `sum a_ij z_i z_j = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleMatrix {
    ty: BundleType,
    /// Upper triangle: `upper[i][j - i] = a_ij`.
    upper: Vec<Vec<HomogeneousForm>>,
}

impl BundleMatrix {
    /// Builds the matrix from its upper triangle, checking every degree.
    pub fn new(ty: BundleType, upper: Vec<Vec<HomogeneousForm>>) -> Result<Self, BundleError> {
        let size = ty.size();
        if upper.len() != size || upper.iter().enumerate().any(|(i, row)| row.len() != size - i) {
            return Err(BundleError::Shape("upper triangle has the wrong shape".into()));
        }
        for (i, row) in upper.iter().enumerate() {
            for (off, a) in row.iter().enumerate() {
                let j = i + off;
                if a.ambient_dim() != ty.n || a.degree() != ty.entry_degree(i, j) {
                    return Err(BundleError::Shape(format!(
                        "a_{i}{j} must have degree {} on P^{}, found degree {} on P^{}",
                        ty.entry_degree(i, j),
                        ty.n,
                        a.degree(),
                        a.ambient_dim()
                    )));
                }
            }
        }
        Ok(Self { ty, upper })
    }

    /// Builds the matrix from a generator `entry(i, j)` called for `i <= j`.
    pub fn from_fn(
        ty: BundleType,
        mut entry: impl FnMut(usize, usize) -> HomogeneousForm,
    ) -> Result<Self, BundleError> {
        let size = ty.size();
        let upper = (0..size).map(|i| (i..size).map(|j| entry(i, j)).collect()).collect();
        Self::new(ty, upper)
    }

    pub fn bundle_type(&self) -> &BundleType {
        &self.ty
    }

    pub fn size(&self) -> usize {
        self.ty.size()
    }

    pub fn entry(&self, i: usize, j: usize) -> &HomogeneousForm {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        &self.upper[a][b - a]
    }

    /// Type read back from the entry degrees: `d_i = |a_ii|`.
    pub fn recomputed_type(&self) -> Vec<u32> {
        (0..self.size()).map(|i| self.entry(i, i).degree()).collect()
    }

    /// `A(x)` at a point of `P^n` given by its `n + 1` coordinates.
    pub fn evaluate(&self, x: &[Rational]) -> Vec<Vec<Rational>> {
        let size = self.size();
        (0..size).map(|i| (0..size).map(|j| self.entry(i, j).evaluate(x)).collect()).collect()
    }

    /// `(d/dx_k A)(x)`.
    pub fn evaluate_partial(&self, k: usize, x: &[Rational]) -> Vec<Vec<Rational>> {
        let size = self.size();
        (0..size)
            .map(|i| (0..size).map(|j| self.entry(i, j).partial_derivative(k).evaluate(x)).collect())
            .collect()
    }

    /// `sum a_ij(x) z_i z_j`.
    pub fn chart_value(&self, x: &[Rational], z: &[Rational]) -> Rational {
        let a = self.evaluate(x);
        let mut total = Rational::from_integer(0.into());
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                total += v * &z[i] * &z[j];
            }
        }
        total
    }

    /// Principal submatrix on `indices`, with its induced type.
    pub fn principal_minor(&self, indices: &[usize]) -> Result<Self, BundleError> {
        if indices.iter().any(|&i| i >= self.size()) || indices.len() < 2 {
            return Err(BundleError::IndexError(format!("indices {indices:?} outside a {}x{} matrix", self.size(), self.size())));
        }
        let degrees = indices.iter().map(|&i| self.ty.degrees[i]).collect();
        let ty = BundleType::new(self.ty.n, indices.len() - 2, degrees)?;
        Self::from_fn(ty, |a, b| self.entry(indices[a], indices[b]).clone())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRecord {
    n: usize,
    r: usize,
    #[serde(rename = "type")]
    degrees: Vec<u32>,
    l: u32,
    twists: Vec<u32>,
    entries: Vec<Vec<HomogeneousForm>>,
}

impl Serialize for BundleMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRecord {
            n: self.ty.n,
            r: self.ty.r,
            degrees: self.ty.degrees.clone(),
            l: self.ty.twist(),
            twists: self.ty.twists(),
            entries: self.upper.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BundleMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rec = MatrixRecord::deserialize(d)?;
        let ty = BundleType::new(rec.n, rec.r, rec.degrees).map_err(D::Error::custom)?;
        if rec.l != ty.twist() || rec.twists != ty.twists() {
            return Err(D::Error::custom("twists do not match the type"));
        }
        BundleMatrix::new(ty, rec.entries).map_err(D::Error::custom)
    }
}

/// A form of `degree` on `P^n` in the variables `vars`, with every monomial
/// present and coefficients drawn from the seeded stream.
pub fn random_form(n: usize, degree: u32, vars: &[usize], rng: &mut SplitMix64) -> HomogeneousForm {
    let terms = all_monomials(vars.len() - 1, degree).into_iter().map(|local| {
        let mut e = vec![0u32; n + 1];
        for (slot, &v) in vars.iter().enumerate() {
            e[v] = local[slot];
        }
        (e, rng.coefficient())
    });
    HomogeneousForm::from_terms(n, degree, terms).expect("degree and dimension match")
}
