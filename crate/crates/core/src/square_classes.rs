//! Square classes of rational functions on `P^n`, tracked through a table of
//! normalized irreducible factors.
//!
//! A form `F` of degree `d` stands for the function `F / x0^d`, so every
//! factor `f` stands for `f / x0^deg(f)` and the chart factor `x0` itself is
//! the trivial function. Constants are squares (the ground field is treated
//! as algebraically closed), so a class is the set of factors with odd
//! exponent, minus `x0`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{FormError, HomogeneousForm};
use crate::linalg;
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("the zero form has no square class")]
    ZeroForm,
    #[error("form lies outside the factor universe: {0}")]
    OutsideUniverse(String),
    #[error("factor {0} vanishes on the hyperplane")]
    NotAUnit(usize),
    #[error("hint does not factor the form")]
    BadHint,
    #[error("unknown factor id {0}")]
    UnknownFactor(usize),
    #[error("factor table entry {0} is invalid: {1}")]
    InvalidTable(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Linear,
    Quadric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub kind: FactorKind,
    pub form: HomogeneousForm,
}

/// Append-only table of pairwise non-proportional normalized factors on `P^n`.
#[derive(Debug, Clone, Default)]
pub struct FactorTable {
    n: usize,
    entries: Vec<FactorEntry>,
    index: HashMap<HomogeneousForm, FactorId>,
}

impl PartialEq for FactorTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

/// `constant * prod f^e`, kept unexpanded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredForm {
    #[serde(with = "wire_rational")]
    pub constant: Rational,
    pub factors: BTreeMap<FactorId, u32>,
}

/// Odd-exponent factors of a function, with the chart factor removed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareClass(BTreeSet<FactorId>);

pub(crate) mod wire_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        rational::to_wire(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl SquareClass {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = FactorId>) -> Self {
        let mut c = Self::trivial();
        for id in ids {
            c.toggle(id);
        }
        c
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: FactorId) -> bool {
        self.0.contains(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = FactorId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn toggle(&mut self, id: FactorId) {
        if !self.0.remove(&id) {
            self.0.insert(id);
        }
    }

    /// Group law of `K*/K*^2`: symmetric difference.
    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.symmetric_difference(&other.0).copied().collect())
    }

    /// The class with `id` removed; used to split off a divisor.
    pub fn without(&self, id: FactorId) -> Self {
        let mut c = self.clone();
        c.0.remove(&id);
        c
    }
}

impl FactoredForm {
    pub fn constant(c: Rational) -> Self {
        Self { constant: c, factors: BTreeMap::new() }
    }

    pub fn single(id: FactorId) -> Self {
        Self { constant: Rational::one(), factors: BTreeMap::from([(id, 1)]) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (id, e) in &other.factors {
            *factors.entry(*id).or_insert(0) += e;
        }
        Self { constant: &self.constant * &other.constant, factors }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            constant: num_traits::pow(self.constant.clone(), k as usize),
            factors: self.factors.iter().map(|(id, e)| (*id, e * k)).filter(|(_, e)| *e > 0).collect(),
        }
    }

    pub fn exponent(&self, id: FactorId) -> u32 {
        self.factors.get(&id).copied().unwrap_or(0)
    }

    /// Removes one power of `id`; `None` if `id` does not occur.
    pub fn divide_factor(&self, id: FactorId) -> Option<Self> {
        let e = self.exponent(id);
        if e == 0 {
            return None;
        }
        let mut out = self.clone();
        if e == 1 {
            out.factors.remove(&id);
        } else {
            out.factors.insert(id, e - 1);
        }
        Some(out)
    }
}

impl FactorTable {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new(), index: HashMap::new() }
    }

    /// Rebuilds a table from serialized entries, checking every invariant.
    pub fn from_entries(n: usize, entries: Vec<FactorEntry>) -> Result<Self, ClassError> {
        let mut table = Self::new(n);
        for (i, entry) in entries.into_iter().enumerate() {
            let bad = |why: &str| ClassError::InvalidTable(i, why.to_string());
            if entry.form.ambient_dim() != n {
                return Err(bad("wrong ambient dimension"));
            }
            if entry.form.normalized().1 != entry.form || entry.form.is_zero() {
                return Err(bad("not normalized"));
            }
            match entry.kind {
                FactorKind::Linear if entry.form.degree() != 1 => return Err(bad("linear entry of wrong degree")),
                FactorKind::Quadric if entry.form.degree() != 2 || entry.form.quadric_rank()? < 3 => {
                    return Err(bad("quadric entry of rank below 3"))
                }
                _ => {}
            }
            if table.index.contains_key(&entry.form) {
                return Err(bad("duplicate entry"));
            }
            table.push(entry.kind, entry.form);
        }
        Ok(table)
    }

    fn push(&mut self, kind: FactorKind, form: HomogeneousForm) -> FactorId {
        let id = FactorId(self.entries.len());
        self.index.insert(form.clone(), id);
        self.entries.push(FactorEntry { kind, form });
        id
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FactorEntry] {
        &self.entries
    }

    pub fn get(&self, id: FactorId) -> Result<&FactorEntry, ClassError> {
        self.entries.get(id.0).ok_or(ClassError::UnknownFactor(id.0))
    }

    pub fn form(&self, id: FactorId) -> &HomogeneousForm {
        &self.entries[id.0].form
    }

    pub fn lookup(&self, form: &HomogeneousForm) -> Option<FactorId> {
        self.index.get(&form.normalized().1).copied()
    }

    /// True for the factor `x0`, which stands for the constant function 1.
    pub fn is_chart(&self, id: FactorId) -> bool {
        let f = self.form(id);
        f.degree() == 1 && *f == HomogeneousForm::variable(self.n, 0)
    }

    fn intern(&mut self, kind: FactorKind, form: &HomogeneousForm) -> (Rational, FactorId) {
        let (lc, normal) = form.normalized();
        let id = match self.index.get(&normal) {
            Some(&id) => id,
            None => self.push(kind, normal),
        };
        (lc, id)
    }

    pub fn register_linear(&mut self, form: &HomogeneousForm) -> Result<FactorId, ClassError> {
        if form.ambient_dim() != self.n {
            return Err(FormError::DimMismatch { left: self.n, right: form.ambient_dim() }.into());
        }
        if form.degree() != 1 {
            return Err(FormError::WrongDegree { expected: 1, found: form.degree() }.into());
        }
        if form.is_zero() {
            return Err(FormError::ZeroLinearForm.into());
        }
        Ok(self.intern(FactorKind::Linear, form).1)
    }

    /// Registers a form of degree at most 2 without a hint.
    fn register_small(&mut self, form: &HomogeneousForm) -> Result<FactoredForm, ClassError> {
        if form.ambient_dim() != self.n {
            return Err(FormError::DimMismatch { left: self.n, right: form.ambient_dim() }.into());
        }
        if form.is_zero() {
            return Err(ClassError::ZeroForm);
        }
        match form.degree() {
            0 => Ok(FactoredForm::constant(form.leading_coefficient().unwrap().clone())),
            1 => {
                let (lc, id) = self.intern(FactorKind::Linear, form);
                Ok(FactoredForm { constant: lc, factors: BTreeMap::from([(id, 1)]) })
            }
            2 => {
                let rank = form.quadric_rank()?;
                if rank >= 3 {
                    let (lc, id) = self.intern(FactorKind::Quadric, form);
                    return Ok(FactoredForm { constant: lc, factors: BTreeMap::from([(id, 1)]) });
                }
                let (u, v) = split_low_rank(form)?;
                let fu = self.register_small(&u)?;
                let fv = self.register_small(&v)?;
                let mut out = fu.mul(&fv);
                // u * v equals form up to the scalar we recover here.
                let uv = u.mul(&v)?;
                out.constant = form.leading_coefficient().unwrap() / uv.leading_coefficient().unwrap()
                    * &out.constant;
                Ok(out)
            }
            d => Err(ClassError::OutsideUniverse(format!("degree {d} form without a factorization hint"))),
        }
    }

    /// Factors `form` into table entries.
    ///
    /// Without a hint only forms of degree at most 2 are accepted. With a hint
    /// every hinted factor is registered and the product is checked against
    /// `form` by expansion; use [`register_factors`](Self::register_factors)
    /// when the product is known by construction and expansion is too large.
    pub fn register(
        &mut self,
        form: &HomogeneousForm,
        hint: Option<&[HomogeneousForm]>,
    ) -> Result<FactoredForm, ClassError> {
        let Some(hint) = hint else {
            return self.register_small(form);
        };
        if form.is_zero() {
            return Err(ClassError::ZeroForm);
        }
        let product = HomogeneousForm::product(self.n, hint)?;
        if product.degree() != form.degree() || product.is_zero() {
            return Err(ClassError::BadHint);
        }
        let ratio = form.leading_coefficient().unwrap() / product.leading_coefficient().unwrap();
        if product.scale(&ratio) != *form {
            return Err(ClassError::BadHint);
        }
        let mut out = self.register_factors(hint)?;
        out.constant *= ratio;
        Ok(out)
    }

    /// Registers the product of `factors` without expanding it.
    pub fn register_factors(&mut self, factors: &[HomogeneousForm]) -> Result<FactoredForm, ClassError> {
        factors
            .iter()
            .try_fold(FactoredForm::constant(Rational::one()), |acc, f| Ok(acc.mul(&self.register_small(f)?)))
    }

    pub fn degree(&self, ff: &FactoredForm) -> u32 {
        ff.factors.iter().map(|(id, e)| self.form(*id).degree() * e).sum()
    }

    /// Multiplies the factored form out. Only for small products.
    pub fn expand(&self, ff: &FactoredForm) -> Result<HomogeneousForm, ClassError> {
        let mut out = HomogeneousForm::constant(self.n, ff.constant.clone());
        for (id, e) in &ff.factors {
            out = out.mul(&self.form(*id).pow(*e))?;
        }
        Ok(out)
    }

    pub fn class_of(&self, ff: &FactoredForm) -> SquareClass {
        SquareClass::from_ids(
            ff.factors
                .iter()
                .filter(|(id, e)| *e % 2 == 1 && !self.is_chart(**id))
                .map(|(id, _)| *id),
        )
    }

    /// Image of one factor on `{ell = 0}`, registered in `target`.
    pub fn restrict_factor(
        &self,
        id: FactorId,
        ell: &HomogeneousForm,
        target: &mut FactorTable,
    ) -> Result<FactoredForm, ClassError> {
        let restricted = self.get(id)?.form.restrict_to_hyperplane(ell)?;
        if restricted.is_zero() {
            return Err(ClassError::NotAUnit(id.0));
        }
        target.register_small(&restricted)
    }

    /// Reduction of a unit class to the hyperplane `{ell = 0}`.
    pub fn restrict_class(
        &self,
        class: &SquareClass,
        ell: &HomogeneousForm,
        target: &mut FactorTable,
    ) -> Result<SquareClass, ClassError> {
        let mut out = SquareClass::trivial();
        for id in class.ids() {
            let ff = self.restrict_factor(id, ell, target)?;
            out = out.mul(&target.class_of(&ff));
        }
        Ok(out)
    }
}

/// Splits a quadric of rank 1 or 2 into two linear forms over `Q`.
fn split_low_rank(form: &HomogeneousForm) -> Result<(HomogeneousForm, HomogeneousForm), ClassError> {
    let pieces = linalg::diagonalize_symmetric(&form.gram_matrix()?);
    match pieces.as_slice() {
        [(_, w)] => {
            let l = HomogeneousForm::linear(w);
            Ok((l.clone(), l))
        }
        [(d1, w1), (d2, w2)] => {
            // d1 w1^2 + d2 w2^2 = d1 (w1 - s w2)(w1 + s w2) with s^2 = -d2/d1.
            let delta = -(d2 / d1);
            let s = rational::sqrt(&delta)
                .ok_or_else(|| ClassError::OutsideUniverse(format!("rank-2 quadric splits only over Q(sqrt({}))", rational::to_text(&delta))))?;
            let minus: Vec<Rational> = w1.iter().zip(w2).map(|(a, b)| a - &s * b).collect();
            let plus: Vec<Rational> = w1.iter().zip(w2).map(|(a, b)| a + &s * b).collect();
            Ok((HomogeneousForm::linear(&minus), HomogeneousForm::linear(&plus)))
        }
        _ => Err(ClassError::OutsideUniverse("quadric of rank 0".into())),
    }
}

impl Serialize for FactorTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            n: usize,
            entries: &'a [FactorEntry],
        }
        Wire { n: self.n, entries: &self.entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FactorTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            entries: Vec<FactorEntry>,
        }
        let w = Wire::deserialize(d)?;
        Self::from_entries(w.n, w.entries).map_err(serde::de::Error::custom)
    }
}
