//! Mod-2 symbol calculus: formal sums of symbols `(a_1, ..., a_n)` of square
//! classes, and residues along linear divisors.
//!
//! With `-1` a square, symbols are symmetric and `(a, a) = 0`, so a symbol is
//! stored with sorted entries and collapses to zero on a trivial or repeated
//! entry. Sums are not reduced by any further relation except in degree 1,
//! where `H^1 = K*/K*^2` is represented exactly by the product class.
//! Equality of classes is therefore syntactic; nonvanishing is only ever
//! concluded through residues.

mod chain;
mod harness;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::FormError;
use crate::square_classes::{ClassError, FactorId, FactorKind, FactorTable, SquareClass};

pub use chain::{iterated_nonvanishing, ChainStep, ResidueChainCertificate, Verdict};
pub use harness::{univariate_residue_harness, HarnessReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohError {
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("residue of a degree-0 class")]
    DegreeZero,
    #[error("factor {0} is not linear")]
    NotLinear(usize),
    #[error("residue along the chart hyperplane x0 = 0 is not supported")]
    ChartDivisor,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

/// Sorted tuple of nontrivial, pairwise distinct square classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Symbol(Vec<SquareClass>);

impl Symbol {
    /// Canonical form of `(entries)`, or `None` when the symbol is zero.
    pub fn normalize(mut entries: Vec<SquareClass>) -> Option<Self> {
        entries.sort();
        if entries.iter().any(SquareClass::is_trivial) || entries.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some(Self(entries))
    }

    /// The unit symbol of degree 0.
    pub fn unit() -> Self {
        Self(Vec::new())
    }

    pub fn entries(&self) -> &[SquareClass] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// Element of `H^n` as a mod-2 set of normalized symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohClass {
    degree: usize,
    symbols: BTreeSet<Symbol>,
}

impl CohClass {
    pub fn zero(degree: usize) -> Self {
        Self { degree, symbols: BTreeSet::new() }
    }

    /// The class `1` in degree 0.
    pub fn one() -> Self {
        Self { degree: 0, symbols: BTreeSet::from([Symbol::unit()]) }
    }

    pub fn symbol(entries: Vec<SquareClass>) -> Self {
        let degree = entries.len();
        let mut c = Self::zero(degree);
        c.toggle_entries(entries);
        c
    }

    /// Sum of the given symbols, each of length `degree`.
    pub fn from_symbols(degree: usize, symbols: impl IntoIterator<Item = Vec<SquareClass>>) -> Result<Self, CohError> {
        let mut c = Self::zero(degree);
        for s in symbols {
            if s.len() != degree {
                return Err(CohError::DegreeMismatch { left: degree, right: s.len() });
            }
            c.toggle_entries(s);
        }
        Ok(c)
    }

    fn toggle_entries(&mut self, entries: Vec<SquareClass>) {
        debug_assert_eq!(entries.len(), self.degree);
        if self.degree == 1 {
            // H^1 is a group under multiplication of classes.
            let current = self.symbols.pop_first().map_or_else(SquareClass::trivial, |s| s.0[0].clone());
            let product = current.mul(&entries[0]);
            if !product.is_trivial() {
                self.symbols.insert(Symbol(vec![product]));
            }
            return;
        }
        if let Some(s) = Symbol::normalize(entries) {
            if !self.symbols.remove(&s) {
                self.symbols.insert(s);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The square class of a degree-1 class.
    pub fn as_square_class(&self) -> Option<SquareClass> {
        (self.degree == 1).then(|| self.symbols.first().map_or_else(SquareClass::trivial, |s| s.0[0].clone()))
    }

    pub fn add(&self, other: &Self) -> Result<Self, CohError> {
        if self.degree != other.degree {
            return Err(CohError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        let mut out = self.clone();
        for s in &other.symbols {
            out.toggle_entries(s.0.clone());
        }
        Ok(out)
    }

    /// Every factor id mentioned by the class.
    pub fn factor_ids(&self) -> BTreeSet<FactorId> {
        self.symbols.iter().flat_map(|s| s.0.iter().flat_map(|c| c.ids())).collect()
    }
}

/// Residue of one symbol whose entries were split along a divisor `D`.
///
/// `odd_units` are the unit parts of the entries with odd valuation, `even`
/// the remaining entries, all already reduced to the residue field. With
/// `m = odd_units.len()`: zero for `m = 0`, `(even)` for `m = 1`, and
/// `sum_i (odd without i) + (even)` for `m >= 2`. For `m = 1` the odd unit
/// part is not read.
pub fn residue_from_parts(odd_units: &[SquareClass], even: &[SquareClass]) -> CohClass {
    let m = odd_units.len();
    let degree = (m + even.len()).saturating_sub(1);
    let mut out = CohClass::zero(degree);
    match m {
        0 => {}
        1 => out.toggle_entries(even.to_vec()),
        _ => {
            for skip in 0..m {
                let entries: Vec<SquareClass> = odd_units
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, c)| c.clone())
                    .chain(even.iter().cloned())
                    .collect();
                out.toggle_entries(entries);
            }
        }
    }
    out
}

/// Residue of `class` along the hyperplane `divisor`, landing in classes over
/// `target`, the factor table of that hyperplane.
pub fn residue(
    class: &CohClass,
    divisor: FactorId,
    table: &FactorTable,
    target: &mut FactorTable,
) -> Result<CohClass, CohError> {
    if class.degree == 0 {
        return Err(CohError::DegreeZero);
    }
    let entry = table.get(divisor)?;
    if entry.kind != FactorKind::Linear {
        return Err(CohError::NotLinear(divisor.0));
    }
    if table.is_chart(divisor) {
        return Err(CohError::ChartDivisor);
    }
    let ell = entry.form.clone();
    let mut cache: HashMap<SquareClass, SquareClass> = HashMap::new();
    let mut restrict = |c: &SquareClass, target: &mut FactorTable| -> Result<SquareClass, CohError> {
        if let Some(r) = cache.get(c) {
            return Ok(r.clone());
        }
        let r = table.restrict_class(c, &ell, target)?;
        cache.insert(c.clone(), r.clone());
        Ok(r)
    };
    let mut out = CohClass::zero(class.degree - 1);
    for symbol in &class.symbols {
        let (odd, even): (Vec<&SquareClass>, Vec<&SquareClass>) = symbol.0.iter().partition(|c| c.contains(divisor));
        // Only restrict what the formula reads.
        let even_r = if odd.is_empty() {
            continue;
        } else {
            even.iter().map(|c| restrict(c, target)).collect::<Result<Vec<_>, _>>()?
        };
        let odd_r = if odd.len() >= 2 {
            odd.iter().map(|c| restrict(&c.without(divisor), target)).collect::<Result<Vec<_>, _>>()?
        } else {
            vec![SquareClass::trivial()]
        };
        let part = residue_from_parts(&odd_r, &even_r);
        out = out.add(&part)?;
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) mod oracle {
    use super::*;
    use std::collections::BTreeMap;

    /// Multilinear expansion into single-factor tuples mod 2. Uses only
    /// bilinearity and `(a, a) = 0`, both valid in `H^n` when `-1` is a
    /// square, so equal expansions imply equal classes.
    pub fn expand(c: &CohClass) -> BTreeMap<Vec<FactorId>, bool> {
        let mut out: BTreeMap<Vec<FactorId>, bool> = BTreeMap::new();
        for s in c.symbols() {
            let mut tuples: Vec<Vec<FactorId>> = vec![Vec::new()];
            for entry in s.entries() {
                tuples = tuples
                    .iter()
                    .flat_map(|t| entry.ids().map(move |id| {
                        let mut t = t.clone();
                        t.push(id);
                        t
                    }))
                    .collect();
            }
            for mut t in tuples {
                t.sort();
                if t.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let slot = out.entry(t).or_insert(false);
                *slot = !*slot;
            }
        }
        out.retain(|_, v| *v);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::expand;
    use super::*;
    use crate::forms::HomogeneousForm;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn lin(c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::linear_i64(c)
    }

    fn class(t: &mut FactorTable, factors: &[HomogeneousForm]) -> SquareClass {
        let ff = t.register_factors(factors).unwrap();
        t.class_of(&ff)
    }

    #[test]
    fn normalization_examples() {
        let mut t = FactorTable::new(2);
        let a = class(&mut t, &[lin(&[0, 1, 0])]);
        let b = class(&mut t, &[lin(&[0, 0, 1])]);
        assert!(Symbol::normalize(vec![a.clone(), a.clone()]).is_none());
        assert!(Symbol::normalize(vec![SquareClass::trivial(), b.clone()]).is_none());
        assert_eq!(Symbol::normalize(vec![a.clone(), b.clone()]), Symbol::normalize(vec![b.clone(), a.clone()]));
        let c = CohClass::symbol(vec![a.clone(), b.clone()]);
        assert!(c.add(&c).unwrap().is_zero());
        assert_eq!(CohClass::zero(2).add(&c).unwrap(), c);
        assert!(c.add(&CohClass::zero(1)).is_err());
    }

    #[test]
    fn residue_single_odd_entry() {
        // a = x1 x2, b = x2 (x0 + x2), along x1 = 0.
        let mut t = FactorTable::new(2);
        let a = class(&mut t, &[lin(&[0, 1, 0]), lin(&[0, 0, 1])]);
        let b = class(&mut t, &[lin(&[0, 0, 1]), lin(&[1, 0, 1])]);
        let d = t.lookup(&lin(&[0, 1, 0])).unwrap();
        let mut line = FactorTable::new(1);
        let r = residue(&CohClass::symbol(vec![a, b]), d, &t, &mut line).unwrap();
        // On {x1 = 0}: x2 -> x1, x0 + x2 -> x0 + x1.
        let expected = class(&mut line, &[lin(&[0, 1]), lin(&[1, 1])]);
        assert_eq!(r.as_square_class().unwrap(), expected);
        assert!(!expected.is_trivial());
    }

    #[test]
    fn residue_of_units_is_zero() {
        let mut t = FactorTable::new(2);
        let a = class(&mut t, &[lin(&[1, 1, 0])]);
        let b = class(&mut t, &[lin(&[1, 0, 1])]);
        let d = t.register_linear(&lin(&[0, 1, 1])).unwrap();
        let mut line = FactorTable::new(1);
        assert!(residue(&CohClass::symbol(vec![a, b]), d, &t, &mut line).unwrap().is_zero());
    }

    #[test]
    fn residue_two_odd_entries() {
        // (x1 u1, x1 u2) along x1: (u1bar) + (u2bar) = (u1bar u2bar).
        let mut t = FactorTable::new(2);
        let x1 = lin(&[0, 1, 0]);
        let u1 = lin(&[1, 0, 1]);
        let u2 = lin(&[1, 0, 2]);
        let a1 = class(&mut t, &[x1.clone(), u1.clone()]);
        let a2 = class(&mut t, &[x1.clone(), u2.clone()]);
        let d = t.lookup(&x1).unwrap();
        let mut line = FactorTable::new(1);
        let r = residue(&CohClass::symbol(vec![a1, a2]), d, &t, &mut line).unwrap();
        let u1b = class(&mut line, &[lin(&[1, 1])]);
        let u2b = class(&mut line, &[lin(&[1, 2])]);
        let expected = CohClass::from_symbols(1, [vec![u1b], vec![u2b]]).unwrap();
        assert_eq!(r, expected);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn chart_and_quadric_divisors_rejected() {
        let mut t = FactorTable::new(2);
        let x0 = t.register_linear(&lin(&[1, 0, 0])).unwrap();
        let q = t.register(&HomogeneousForm::parse("x0^2+x1^2+x2^2", 2, None).unwrap(), None).unwrap();
        let qid = *q.factors.keys().next().unwrap();
        let c = CohClass::symbol(vec![SquareClass::from_ids([qid])]);
        let mut line = FactorTable::new(1);
        assert_eq!(residue(&c, x0, &t, &mut line), Err(CohError::ChartDivisor));
        assert_eq!(residue(&c, qid, &t, &mut line), Err(CohError::NotLinear(qid.0)));
        assert_eq!(residue(&CohClass::one(), x0, &t, &mut line), Err(CohError::DegreeZero));
    }

    #[test]
    fn expansion_oracle_sees_bilinearity() {
        let mut t = FactorTable::new(2);
        let f = class(&mut t, &[lin(&[1, 1, 0])]);
        let g = class(&mut t, &[lin(&[1, 0, 1])]);
        let b = class(&mut t, &[lin(&[0, 1, 1])]);
        let lhs = CohClass::symbol(vec![f.mul(&g), b.clone()]);
        let rhs = CohClass::symbol(vec![f, b.clone()]).add(&CohClass::symbol(vec![g, b])).unwrap();
        assert_ne!(lhs, rhs);
        assert_eq!(expand(&lhs), expand(&rhs));
    }

    /// Random symbols in P^3 over a pool of linear forms through a fixed
    /// divisor pool, so that odd valuations and repeats are common.
    struct Pool {
        table: FactorTable,
        ids: Vec<FactorId>,
    }

    fn pool(seed: u64) -> Pool {
        let mut g = SplitMix64::new(seed);
        let mut table = FactorTable::new(3);
        let mut ids = Vec::new();
        while ids.len() < 7 {
            let c: Vec<i64> = (0..4).map(|_| g.range_i64(-3, 3)).collect();
            if c[1..].iter().all(|&x| x == 0) {
                continue; // zero or proportional to x0
            }
            let id = table.register_linear(&HomogeneousForm::linear_i64(&c)).unwrap();
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
        Pool { table, ids }
    }

    fn random_class(p: &Pool, picks: &[Vec<usize>]) -> SquareClass {
        SquareClass::from_ids(picks.iter().flatten().map(|&i| p.ids[i % p.ids.len()]))
    }

    fn symbol_strategy() -> impl Strategy<Value = Vec<Vec<Vec<usize>>>> {
        proptest::collection::vec(proptest::collection::vec(proptest::collection::vec(0usize..7, 1..3), 1..2), 1..4)
    }

    proptest! {
        #[test]
        fn residue_is_additive(s1 in symbol_strategy(), s2 in symbol_strategy(), d in 0usize..7, seed in 0u64..4) {
            let p = pool(seed);
            let deg = s1.len().min(s2.len());
            let c1 = CohClass::symbol(s1[..deg].iter().map(|e| random_class(&p, e)).collect());
            let c2 = CohClass::symbol(s2[..deg].iter().map(|e| random_class(&p, e)).collect());
            let div = p.ids[d];
            let mut line = FactorTable::new(2);
            let r1 = residue(&c1, div, &p.table, &mut line).unwrap();
            let r2 = residue(&c2, div, &p.table, &mut line).unwrap();
            let r12 = residue(&c1.add(&c2).unwrap(), div, &p.table, &mut line).unwrap();
            prop_assert_eq!(r12, r1.add(&r2).unwrap());
        }

        #[test]
        fn residue_respects_slot_bilinearity(s in symbol_strategy(), extra in proptest::collection::vec(0usize..7, 1..3), slot in 0usize..3, d in 0usize..7) {
            let p = pool(11);
            let entries: Vec<SquareClass> = s.iter().map(|e| random_class(&p, e)).collect();
            let slot = slot % entries.len();
            let f = entries[slot].clone();
            let g = random_class(&p, &[extra]);
            let mut with_f = entries.clone();
            with_f[slot] = f.clone();
            let mut with_g = entries.clone();
            with_g[slot] = g.clone();
            let mut with_fg = entries.clone();
            with_fg[slot] = f.mul(&g);
            let div = p.ids[d];
            let mut line = FactorTable::new(2);
            let lhs = residue(&CohClass::symbol(with_fg), div, &p.table, &mut line).unwrap();
            let rhs = residue(&CohClass::symbol(with_f), div, &p.table, &mut line).unwrap()
                .add(&residue(&CohClass::symbol(with_g), div, &p.table, &mut line).unwrap()).unwrap();
            prop_assert_eq!(expand(&lhs), expand(&rhs));
        }
    }
}
