//! Applicability of the unirationality criterion to a diagonal form
//! `<e_0, e_1, ...>`. With `a = e_1 / e_0` it applies when `e_0, e_1` are both
//! linear, or when `e_0` is constant, `e_1` has degree 2, and the
//! homogenization of `e_0 z^2 - e_1` is a quadratic form of rank at least 3
//! over `C(z)`.

use serde::{Deserialize, Serialize};

use crate::cto::{CoefficientLedger, Family};
use crate::forms::HomogeneousForm;
use crate::linalg;
use crate::rational::int;
use crate::square_classes::{FactorKind, FactorTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnirationalCase {
    LinearPair,
    RankThreeQuadric,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnirationalityRecord {
    pub degrees: (u32, u32),
    pub case: UnirationalCase,
    /// For degrees `(0, 2)`: `e_1` is a product of two rational linear forms
    /// in `x_0, x_1, x_2`.
    pub lines_in_plane: Option<bool>,
    /// For degrees `(0, 2)`: rank over `C(z)` of `e_0 z^2 x_0^2 - e_1`.
    pub homogenized_rank: Option<usize>,
    pub reason: String,
}

/// Generic rank of `w e_0 E_00 - Gram(e_1)` in `w`. Every minor is affine in
/// `w` because `E_00` has rank one, so the generic rank is attained at
/// `w = 1` or `w = 2`.
fn homogenized_rank(e0: &HomogeneousForm, e1: &HomogeneousForm) -> usize {
    let gram = e1.neg().gram_matrix().expect("degree 2");
    let c = e0.leading_coefficient().cloned().unwrap_or_else(|| int(0));
    [1, 2]
        .into_iter()
        .map(|w| {
            let mut m = gram.clone();
            m[0][0] += &c * int(w);
            linalg::rank(&m)
        })
        .max()
        .unwrap()
}

fn lines_in_plane(e1: &HomogeneousForm) -> bool {
    let mut table = FactorTable::new(e1.ambient_dim());
    let Ok(ff) = table.register(e1, None) else {
        return false;
    };
    let count: u32 = ff.factors.values().sum();
    count == 2
        && ff.factors.keys().all(|id| {
            let entry = table.get(*id).expect("registered");
            entry.kind == FactorKind::Linear && entry.form.support().iter().all(|&v| v <= 2)
        })
}

pub fn unirationality_precondition(e0: &HomogeneousForm, e1: &HomogeneousForm) -> UnirationalityRecord {
    let degrees = (e0.degree(), e1.degree());
    let record = |case, lines, rank, reason: &str| UnirationalityRecord {
        degrees,
        case,
        lines_in_plane: lines,
        homogenized_rank: rank,
        reason: reason.to_string(),
    };
    if e0.is_zero() || e1.is_zero() {
        return record(UnirationalCase::NotApplicable, None, None, "zero entry");
    }
    match degrees {
        (1, 1) => record(UnirationalCase::LinearPair, None, None, "both entries are linear"),
        (0, 2) => {
            let lines = lines_in_plane(e1);
            let rank = homogenized_rank(e0, e1);
            let case = if lines && rank >= 3 { UnirationalCase::RankThreeQuadric } else { UnirationalCase::NotApplicable };
            let reason = match (lines, rank >= 3) {
                (true, true) => "e_1 is a product of two lines in x0, x1, x2 and the homogenization has rank >= 3",
                (false, _) => "e_1 is not a product of two rational lines in x0, x1, x2",
                (true, false) => "the homogenization has rank below 3",
            };
            record(case, Some(lines), Some(rank), reason)
        }
        _ => record(UnirationalCase::NotApplicable, None, None, "degrees are neither (0, 2) nor (1, 1)"),
    }
}

/// The record for entries 0 and 1 of a ledger family.
pub fn unirationality_from_ledger(ledger: &CoefficientLedger, family: Family) -> UnirationalityRecord {
    let m = ledger.degrees(family);
    if !matches!((m[0], m[1]), (0, 2) | (1, 1)) {
        return UnirationalityRecord {
            degrees: (m[0], m[1]),
            case: UnirationalCase::NotApplicable,
            lines_in_plane: None,
            homogenized_rank: None,
            reason: "degrees are neither (0, 2) nor (1, 1)".into(),
        };
    }
    match (ledger.expand(family, 0), ledger.expand(family, 1)) {
        (Ok(e0), Ok(e1)) => unirationality_precondition(&e0, &e1),
        _ => UnirationalityRecord {
            degrees: (m[0], m[1]),
            case: UnirationalCase::NotApplicable,
            lines_in_plane: None,
            homogenized_rank: None,
            reason: "entries could not be expanded".into(),
        },
    }
}
