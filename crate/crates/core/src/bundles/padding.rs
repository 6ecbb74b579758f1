//! Diagonal bundles `sum e_i z_i^2 = 0` of a prescribed type, obtained from a
//! coefficient family by padding: `e_0 = l^{d_0 - m_0} c_0` for a general
//! linear form `l`, and `e_i = x0^{d_i - m_i} c_i` for `i >= 1`.

use serde::{Deserialize, Serialize};

use super::types::BundleType;
use super::BundleError;
use crate::cto::{CoefficientLedger, Family};
use crate::forms::HomogeneousForm;
use crate::square_classes::{FactorTable, FactoredForm};

/// Checks `2^{n-1} <= r + 1 < 2^n`.
pub fn check_range(n: usize, r: usize) -> Result<(), BundleError> {
    if n >= 2 && n < 63 && (1usize << (n - 1)) <= r + 1 && r + 1 < (1usize << n) {
        Ok(())
    } else {
        Err(BundleError::RangeError { n, r })
    }
}

/// Degrees of a family computed from the definitions alone, in the natural
/// index order: `|c| = 2|eps| + 2^{n+1} eps_n`, `|c~| = 2^n + n - 1`, and
/// the primed families shift by one according to whether `l_1` divides.
pub fn family_degrees(n: usize, family: Family) -> Vec<u32> {
    let map = crate::cto::IndexMap::natural(n);
    let big = 1u32 << (n + 1);
    (0..map.len())
        .map(|i| {
            let (eps, top) = map.inverse(i);
            let h1 = eps & 1 == 1;
            let m = 2 * eps.count_ones() + if top { big } else { 0 };
            let m_tilde = (1u32 << n) + n as u32 - 1;
            match family {
                Family::C => m,
                // l_1 divides c exactly when h_1 occurs.
                Family::CPrime => if h1 { m - 1 } else { m + 1 },
                Family::CTilde => m_tilde,
                // c~ contains l_1 exactly when eps_1 = 0.
                Family::CTildePrime => if h1 { m_tilde + 1 } else { m_tilde - 1 },
            }
        })
        .collect()
}

/// Degrees for the family of bundles degenerating in degree `d`:
/// `d_i = m_i` for `i <= r` and `d_{r+1} = d - sum_{i <= r} m_i`, with the
/// `c` family for even `d` and the `c'` family for odd `d`.
pub fn family_type_degrees(n: usize, r: usize, d: u64) -> Result<(Family, Vec<u32>), BundleError> {
    check_range(n, r)?;
    let family = if d % 2 == 0 { Family::C } else { Family::CPrime };
    let m = family_degrees(n, family);
    let head: u64 = m[..=r].iter().map(|&x| u64::from(x)).sum();
    let last = d.checked_sub(head).ok_or(BundleError::DegreeShortfall { index: r + 1, degree: 0, required: m[r + 1] })?;
    let last = u32::try_from(last).map_err(|_| BundleError::Shape(format!("degree {d} too large")))?;
    let mut out = m[..=r].to_vec();
    out.push(last);
    Ok((family, out))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModel {
    pub family: Family,
    pub bundle_type: BundleType,
    /// `m_i` of the family for `i = 0..r+1`.
    pub family_degrees: Vec<u32>,
    /// `d_i - m_i`, the power of `l` (for `i = 0`) or `x0` padding `c_i`.
    pub padding: Vec<u32>,
    /// `floor(d_i / 2)`: the model lives in `P(sum O(-floor(d_i / 2)))`.
    pub bundle_twists: Vec<u32>,
    /// `floor(m_i / 2)`, the twists of the unpadded family.
    pub family_twists: Vec<u32>,
    /// Factor table of `P^n` holding the factors of every entry.
    pub table: FactorTable,
    pub entries: Vec<FactoredForm>,
}

impl DiagonalModel {
    pub fn expand(&self, i: usize) -> Result<HomogeneousForm, BundleError> {
        Ok(self.table.expand(&self.entries[i])?)
    }
}

/// Pads entries `0..=r+1` of `family` to the degrees `degrees`.
pub fn padded_diagonal(
    ledger: &CoefficientLedger,
    family: Family,
    r: usize,
    degrees: &[u32],
    general_linear: &HomogeneousForm,
) -> Result<DiagonalModel, BundleError> {
    let n = ledger.n;
    check_range(n, r)?;
    if degrees.len() != r + 2 {
        return Err(BundleError::Shape(format!("expected {} degrees, got {}", r + 2, degrees.len())));
    }
    let m = &ledger.degrees(family)[..r + 2];
    let parity = m[0] % 2;
    if let Some(i) = degrees.iter().position(|d| d % 2 != parity) {
        return Err(BundleError::ParityMismatch(format!(
            "d_{i} = {} but the {} family needs degrees of parity {parity}",
            degrees[i],
            family.name()
        )));
    }
    if let Some(i) = (0..r + 2).find(|&i| degrees[i] < m[i]) {
        return Err(BundleError::DegreeShortfall { index: i, degree: degrees[i], required: m[i] });
    }
    let mut table = ledger.table().clone();
    let l_id = table.register_linear(general_linear)?;
    let x0_id = table.register_linear(&HomogeneousForm::variable(n, 0))?;
    let padding: Vec<u32> = degrees.iter().zip(m).map(|(d, mi)| d - mi).collect();
    let entries = (0..r + 2)
        .map(|i| {
            let pad = FactoredForm::single(if i == 0 { l_id } else { x0_id }).pow(padding[i]);
            ledger.family(family)[i].mul(&pad)
        })
        .collect();
    Ok(DiagonalModel {
        family,
        bundle_type: BundleType::new(n, r, degrees.to_vec())?,
        family_degrees: m.to_vec(),
        padding,
        bundle_twists: degrees.iter().map(|d| d / 2).collect(),
        family_twists: m.iter().map(|d| d / 2).collect(),
        table,
        entries,
    })
}
