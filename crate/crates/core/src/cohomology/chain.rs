//! Nonvanishing certificates by successive residues along hyperplanes.

use serde::{Deserialize, Serialize};

use super::{residue, CohClass, CohError};
use crate::forms::{HomogeneousForm, LinearChange};
use crate::linalg;
use crate::rational::{self, int, Rational};
use crate::square_classes::{FactorId, FactorTable, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Nonzero,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    /// Divisor in the coordinates of the space the residue is taken on.
    pub divisor: HomogeneousForm,
    /// Factor table of the hyperplane the residue lands on.
    pub table: FactorTable,
    pub class: CohClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueChainCertificate {
    /// Divisors in the order the residues are taken, as ids of the input table.
    pub chain: Vec<FactorId>,
    /// Rows are the new coordinates `y = M x`; the k-th divisor becomes
    /// `y_{n-k}` so that every restriction eliminates the last variable.
    pub change_of_variables: Vec<Vec<String>>,
    pub initial_table: FactorTable,
    pub initial_class: CohClass,
    pub steps: Vec<ChainStep>,
    /// Terminal class when it has degree 1.
    pub terminal: Option<SquareClass>,
    pub verdict: Verdict,
}

fn coordinate_matrix(n: usize, chain_rows: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>, CohError> {
    let unit = |k: usize| (0..=n).map(|i| int((i == k) as i64)).collect::<Vec<_>>();
    let mut fixed = vec![unit(0)];
    fixed.extend(chain_rows.iter().cloned());
    if linalg::rank(&fixed) != fixed.len() {
        return Err(CohError::PreconditionFailed(
            "x0 vanishes identically on the intersection of the chain hyperplanes".into(),
        ));
    }
    // Complete with standard basis vectors between x0 and the chain rows.
    let mut fill = Vec::new();
    for k in 1..=n {
        if fixed.len() + fill.len() == n + 1 {
            break;
        }
        let mut trial: Vec<Vec<Rational>> = fixed.iter().chain(fill.iter()).cloned().collect();
        trial.push(unit(k));
        if linalg::rank(&trial) == trial.len() {
            fill.push(unit(k));
        }
    }
    let mut rows = vec![unit(0)];
    rows.extend(fill);
    rows.extend(chain_rows.iter().rev().cloned());
    Ok(rows)
}

/// Takes residues of `class` along `chain` in order and inspects what is left.
///
/// The verdict is `Nonzero` only when the terminal class is exactly decidable:
/// a nontrivial degree-1 class, or the unit class in degree 0. A nonzero
/// terminal class forces every class along the chain, including `class`,
/// to be nonzero.
pub fn iterated_nonvanishing(
    class: &CohClass,
    table: &FactorTable,
    chain: &[FactorId],
) -> Result<ResidueChainCertificate, CohError> {
    let n = table.ambient_dim();
    if chain.len() > class.degree() || chain.len() > n {
        return Err(CohError::PreconditionFailed("chain longer than the degree or dimension".into()));
    }
    let mut chain_rows = Vec::with_capacity(chain.len());
    for id in chain {
        let entry = table.get(*id)?;
        if entry.form.degree() != 1 {
            return Err(CohError::NotLinear(id.0));
        }
        chain_rows.push(entry.form.linear_coefficients().expect("linear"));
    }
    let rows = coordinate_matrix(n, &chain_rows)?;
    let to_old = LinearChange::new(linalg::inverse(&rows).expect("full rank")).expect("invertible");

    // Move every factor the class mentions into y-coordinates.
    let mut current_table = FactorTable::new(n);
    let mut image = std::collections::HashMap::new();
    for id in class.factor_ids() {
        let moved = table.form(id).substitute(&to_old)?;
        let ff = current_table.register(&moved, None)?;
        image.insert(id, current_table.class_of(&ff));
    }
    let map_class = |c: &SquareClass| c.ids().fold(SquareClass::trivial(), |acc, id| acc.mul(&image[&id]));
    let mut current = CohClass::from_symbols(
        class.degree(),
        class.symbols().map(|s| s.entries().iter().map(map_class).collect()),
    )?;
    let initial_table = current_table.clone();
    let initial_class = current.clone();

    let mut steps = Vec::with_capacity(chain.len());
    for k in 0..chain.len() {
        let dim = n - k;
        let divisor = HomogeneousForm::variable(dim, dim);
        let div_id = current_table.register_linear(&divisor)?;
        let mut target = FactorTable::new(dim - 1);
        current = residue(&current, div_id, &current_table, &mut target)?;
        steps.push(ChainStep { divisor, table: target.clone(), class: current.clone() });
        current_table = target;
    }

    let terminal = current.as_square_class();
    let nonzero = match current.degree() {
        0 => current == CohClass::one(),
        1 => !current.is_zero(),
        _ => false,
    };
    Ok(ResidueChainCertificate {
        chain: chain.to_vec(),
        change_of_variables: rows.iter().map(|r| r.iter().map(rational::to_wire).collect()).collect(),
        initial_table,
        initial_class,
        steps,
        terminal,
        verdict: if nonzero { Verdict::Nonzero } else { Verdict::Inconclusive },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(c: &[i64]) -> HomogeneousForm {
        HomogeneousForm::linear_i64(c)
    }

    #[test]
    fn two_step_chain_in_p3() {
        // (u1 u2, x3' w, x2' v) with divisors x3' then x2' ends at (u1 u2) on a line.
        let mut t = FactorTable::new(3);
        let u1 = t.register_linear(&lin(&[1, 1, 0, 0])).unwrap();
        let u2 = t.register_linear(&lin(&[1, 2, 0, 0])).unwrap();
        let d1 = t.register_linear(&lin(&[1, 1, 1, 1])).unwrap();
        let d2 = t.register_linear(&lin(&[0, 1, -1, 2])).unwrap();
        let w = t.register_linear(&lin(&[3, 0, 1, 0])).unwrap();
        let a = SquareClass::from_ids([u1, u2]);
        let b = SquareClass::from_ids([d2, w]);
        let c = SquareClass::from_ids([d1]);
        let alpha = CohClass::symbol(vec![a, b, c]);
        let cert = iterated_nonvanishing(&alpha, &t, &[d1, d2]).unwrap();
        assert_eq!(cert.verdict, Verdict::Nonzero);
        assert_eq!(cert.steps.len(), 2);
        assert_eq!(cert.terminal.as_ref().map(|c| c.len()), Some(2));
        let json = serde_json::to_string(&cert).unwrap();
        let back: ResidueChainCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn zero_class_is_inconclusive() {
        let mut t = FactorTable::new(2);
        let d = t.register_linear(&lin(&[0, 1, 1])).unwrap();
        let cert = iterated_nonvanishing(&CohClass::zero(2), &t, &[d]).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert!(cert.terminal.unwrap().is_trivial());
    }

    #[test]
    fn x0_on_chain_intersection_is_rejected() {
        let mut t = FactorTable::new(2);
        let d1 = t.register_linear(&lin(&[0, 1, 0])).unwrap();
        let d2 = t.register_linear(&lin(&[0, 0, 1])).unwrap();
        let alpha = CohClass::symbol(vec![SquareClass::from_ids([d1]), SquareClass::from_ids([d2])]);
        assert!(iterated_nonvanishing(&alpha, &t, &[d1, d2]).is_ok());
        let d3 = t.register_linear(&lin(&[1, 1, 0])).unwrap();
        let d4 = t.register_linear(&lin(&[1, 2, 0])).unwrap();
        let beta = CohClass::symbol(vec![SquareClass::from_ids([d3]), SquareClass::from_ids([d4])]);
        assert!(matches!(iterated_nonvanishing(&beta, &t, &[d3, d4]), Err(CohError::PreconditionFailed(_))));
    }
}
