//! The four coefficient families of the diagonal forms, kept factored over
//! the arrangement's factor table. For `(eps, eps_n) in {0,1}^n`:
//!
//! * `c = prod_i h_i^{eps_i} (g_1 g_2)^{eps_n}`
//! * `c~ = prod_i l_{2i-1}^{1-eps_i} l_{2i}^{eps_i} g_1^{1-eps_n} g_2^{eps_n}`
//!
//! and the primed families multiply by `l_1`, or divide by it when it
//! already divides the entry. Entry `i` of a family is the value at
//! `phi^{-1}(i)`.

use serde::{Deserialize, Serialize};

use super::config::{eps_bit, ArrangementConfig, IndexMap};
use super::CtoError;
use crate::forms::HomogeneousForm;
use crate::rational::int;
use crate::square_classes::{FactorId, FactorTable, FactoredForm, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    C,
    CPrime,
    CTilde,
    CTildePrime,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::C, Family::CPrime, Family::CTilde, Family::CTildePrime];

    pub fn name(self) -> &'static str {
        match self {
            Family::C => "c",
            Family::CPrime => "cprime",
            Family::CTilde => "ctilde",
            Family::CTildePrime => "ctildeprime",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// The arrangement registered in a factor table on `P^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrangementFactors {
    pub table: FactorTable,
    /// Ids of `l_1..l_{2n+2}`, normalized to leading coefficient 1.
    pub lines: Vec<FactorId>,
    /// `l_1..l_{2n+2}` with their constants.
    pub line_forms: Vec<FactoredForm>,
    pub h: Vec<FactoredForm>,
    /// `g[j-1][eps]`.
    pub g: [Vec<FactoredForm>; 2],
}

impl ArrangementFactors {
    /// `h_i` and `g_{j0}` are registered as products of their lines; the
    /// remaining `g_{j,eps}` are factored from the stored forms.
    pub fn new(config: &ArrangementConfig) -> Result<Self, CtoError> {
        let n = config.n;
        if config.lines.len() != 2 * n + 2 {
            return Err(CtoError::NeedsLines);
        }
        let mut table = FactorTable::new(n);
        let line_forms = config
            .lines
            .iter()
            .map(|l| table.register_factors(std::slice::from_ref(l)))
            .collect::<Result<Vec<_>, _>>()?;
        let lines = line_forms.iter().map(|f| *f.factors.keys().next().expect("linear")).collect();
        let pair = |table: &mut FactorTable, a: usize| table.register_factors(&config.lines[a - 1..=a]);
        let h = (1..n).map(|i| pair(&mut table, 2 * i - 1)).collect::<Result<Vec<_>, _>>()?;
        let mut g: [Vec<FactoredForm>; 2] = [Vec::new(), Vec::new()];
        for j in 1..=2 {
            for eps in 0..config.num_eps() {
                let ff = if eps == 0 {
                    pair(&mut table, 2 * n - 3 + 2 * j)?
                } else {
                    table.register(config.g_form(j, eps), None)?
                };
                g[j - 1].push(ff);
            }
        }
        Ok(Self { table, lines, line_forms, h, g })
    }

    pub fn line(&self, k: usize) -> FactorId {
        self.lines[k - 1]
    }

    pub fn line_form(&self, k: usize) -> &FactoredForm {
        &self.line_forms[k - 1]
    }

    /// `g_j = prod_eps g_{j,eps}`.
    pub fn g_product(&self, j: usize) -> FactoredForm {
        self.g[j - 1].iter().fold(FactoredForm::constant(int(1)), |acc, f| acc.mul(f))
    }

    /// `a_i`, the class of `h_i`; the `x0^2` denominator is a square.
    pub fn a_class(&self, i: usize) -> SquareClass {
        self.table.class_of(&self.h[i - 1])
    }

    /// `b_j`, the class of `g_j`; the `x0^{2^n}` denominator is a square.
    pub fn b_class(&self, j: usize) -> SquareClass {
        self.table.class_of(&self.g_product(j))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientLedger {
    pub n: usize,
    pub index_map: IndexMap,
    pub factors: ArrangementFactors,
    pub c: Vec<FactoredForm>,
    pub c_prime: Vec<FactoredForm>,
    pub c_tilde: Vec<FactoredForm>,
    pub c_tilde_prime: Vec<FactoredForm>,
    pub m: Vec<u32>,
    pub m_prime: Vec<u32>,
    pub m_tilde: Vec<u32>,
    pub m_tilde_prime: Vec<u32>,
}

impl CoefficientLedger {
    pub fn family(&self, family: Family) -> &[FactoredForm] {
        match family {
            Family::C => &self.c,
            Family::CPrime => &self.c_prime,
            Family::CTilde => &self.c_tilde,
            Family::CTildePrime => &self.c_tilde_prime,
        }
    }

    pub fn degrees(&self, family: Family) -> &[u32] {
        match family {
            Family::C => &self.m,
            Family::CPrime => &self.m_prime,
            Family::CTilde => &self.m_tilde,
            Family::CTildePrime => &self.m_tilde_prime,
        }
    }

    pub fn table(&self) -> &FactorTable {
        &self.factors.table
    }

    /// Multiplies entry `i` of `family` out.
    pub fn expand(&self, family: Family, i: usize) -> Result<HomogeneousForm, CtoError> {
        Ok(self.table().expand(&self.family(family)[i])?)
    }
}

/// `l_1 ff` when `l_1` does not divide `ff`, `ff / l_1` otherwise.
/// Divisibility is decided factor by factor with exact division.
fn prime_rule(ff: &FactoredForm, l1: &FactoredForm, table: &FactorTable) -> Result<FactoredForm, CtoError> {
    let l1_form = table.expand(l1)?;
    for id in ff.factors.keys() {
        if let Some(q) = table.form(*id).divide_by_linear(&l1_form)? {
            // `id` is l1 up to the constant q (a factor of degree 1), or a
            // reducible quadric, which the table never stores.
            debug_assert_eq!(q.degree(), 0);
            let mut out = ff.divide_factor(*id).expect("present");
            out.constant *= q.leading_coefficient().expect("nonzero quotient").clone();
            return Ok(out);
        }
    }
    Ok(ff.mul(l1))
}

pub fn build_ledger(config: &ArrangementConfig, map: &IndexMap) -> Result<CoefficientLedger, CtoError> {
    if map.n != config.n {
        return Err(CtoError::InvalidIndexMap(format!("map is for n = {}, config for n = {}", map.n, config.n)));
    }
    map.validate()?;
    let factors = ArrangementFactors::new(config)?;
    let n = config.n;
    let one = FactoredForm::constant(int(1));
    let g1 = factors.g_product(1);
    let g2 = factors.g_product(2);
    let g12 = g1.mul(&g2);
    let l1 = factors.line_form(1).clone();

    let mut out = CoefficientLedger {
        n,
        index_map: map.clone(),
        factors: factors.clone(),
        c: Vec::new(),
        c_prime: Vec::new(),
        c_tilde: Vec::new(),
        c_tilde_prime: Vec::new(),
        m: Vec::new(),
        m_prime: Vec::new(),
        m_tilde: Vec::new(),
        m_tilde_prime: Vec::new(),
    };
    for index in 0..map.len() {
        let (eps, top) = map.inverse(index);
        let mut c = if top { g12.clone() } else { one.clone() };
        let mut c_tilde = if top { g2.clone() } else { g1.clone() };
        for i in 1..n {
            let on = eps_bit(eps, i);
            if on {
                c = c.mul(&factors.h[i - 1]);
            }
            let k = if on { 2 * i } else { 2 * i - 1 };
            c_tilde = c_tilde.mul(factors.line_form(k));
        }
        let c_prime = prime_rule(&c, &l1, &factors.table)?;
        let c_tilde_prime = prime_rule(&c_tilde, &l1, &factors.table)?;
        let table = &factors.table;
        out.m.push(table.degree(&c));
        out.m_prime.push(table.degree(&c_prime));
        out.m_tilde.push(table.degree(&c_tilde));
        out.m_tilde_prime.push(table.degree(&c_tilde_prime));
        out.c.push(c);
        out.c_prime.push(c_prime);
        out.c_tilde.push(c_tilde);
        out.c_tilde_prime.push(c_tilde_prime);
    }
    Ok(out)
}
