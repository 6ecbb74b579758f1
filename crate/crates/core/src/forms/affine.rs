//! Dehomogenized polynomials, kept with enough data to homogenize back.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{FormError, HomogeneousForm, Monomial};
use crate::rational::Rational;

/// `f` with `x_var := 1`. Exponent vectors keep the full length `n + 1` with
/// a zero in slot `var`, so the chart variable stays identifiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePolynomial {
    n: usize,
    var: usize,
    source_degree: u32,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl AffinePolynomial {
    pub(super) fn from_form(f: &HomogeneousForm, var: usize) -> Self {
        assert!(var <= f.n);
        let mut terms: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (m, c) in &f.terms {
            let mut e = m.0.clone();
            e[var] = 0;
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { n: f.n, var, source_degree: f.degree, terms }
    }

    pub fn chart_variable(&self) -> usize {
        self.var
    }

    pub fn source_degree(&self) -> u32 {
        self.source_degree
    }

    /// Largest total degree of a term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            let v = e
                .iter()
                .zip(point)
                .enumerate()
                .filter(|(i, _)| *i != self.var)
                .fold(c.clone(), |v, (_, (&k, x))| v * num_traits::pow(x.clone(), k as usize));
            acc + v
        })
    }

    /// Homogenizes to `degree`, which must be at least the total degree.
    pub fn rehomogenize(&self, degree: u32) -> Result<HomogeneousForm, FormError> {
        if let Some(top) = self.total_degree() {
            if top > degree {
                return Err(FormError::WrongDegree { expected: degree, found: top });
            }
        }
        let mut f = HomogeneousForm::zero(self.n, degree);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[self.var] = degree - e.iter().sum::<u32>();
            f.insert(Monomial(e), c.clone());
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn chart_examples() {
        let x0sq = HomogeneousForm::variable(2, 0).pow(2);
        let a = x0sq.dehomogenize(0);
        assert_eq!(a.total_degree(), Some(0));
        assert_eq!(a.evaluate(&[int(5), int(3), int(4)]), int(1));
        assert_eq!(a.rehomogenize(2).unwrap(), x0sq);
        let x1 = HomogeneousForm::variable(2, 1);
        assert!(x1.dehomogenize(0).rehomogenize(0).is_err());
    }
}
