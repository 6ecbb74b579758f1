//! The verifier's four checks.
//!
//! * C1: `codim {h_{i_1} = .. = h_{i_c} = g_j = 0} >= c + 1`
//! * C2: `codim {h_{i_1} = .. = h_{i_c} = g_1 = g_2 = 0} >= c + 2`
//! * C3: both symbols `(a_1, .., a_{n-1}, b_j)` are nonzero
//! * C4: `g_{j,eps+e_i} - g_{j,eps} = h_i`, so `g_j` is a square modulo `h_i`
//!
//! C1 and C2 are decided component by component: one line from each chosen
//! `h_i` cuts out a linear space `V = P^{k-1}`, and each quadric `g_{j,eps}`
//! is restricted to `V` through a kernel basis. Over `C`, a nonzero quadric
//! on `P^{k-1}` is empty iff `k <= 1`, and two quadrics without common factor
//! meet in codimension 2, which is empty iff `k <= 2`.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{eps_bit, ArrangementConfig};
use super::ledger::ArrangementFactors;
use crate::cohomology::{iterated_nonvanishing, CohClass, ResidueChainCertificate, Verdict};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    CannotCertify,
}

/// One component candidate of a C1/C2 intersection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimWitness {
    /// The chosen `i` with `h_i` in the intersection.
    pub subset: Vec<usize>,
    /// The line of each chosen `h_i`, as `k` in `l_k`.
    pub lines: Vec<usize>,
    /// `(j, eps)` of the quadrics `g_{j,eps}`.
    pub quadrics: Vec<(usize, usize)>,
    /// `None` when the component is empty.
    pub codim: Option<usize>,
    pub bound: usize,
}

impl CodimWitness {
    pub fn holds(&self) -> bool {
        self.codim.map_or(true, |c| c >= self.bound)
    }

    /// Codimension minus bound; empty components count as `n + 1`.
    fn slack(&self, n: usize) -> i64 {
        self.codim.unwrap_or(n + 1) as i64 - self.bound as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimCheck {
    pub name: String,
    pub status: CheckStatus,
    pub components_checked: usize,
    pub failures: Vec<CodimWitness>,
    /// A component of least slack, first in enumeration order.
    pub tightest: Option<CodimWitness>,
    pub reason: Option<String>,
}

/// A quadric restricted to the linear space `V`.
#[derive(Debug, Clone)]
struct Restricted {
    gram: Matrix,
    zero: bool,
    rank: usize,
    /// Normalized linear factors when the restriction splits over `Q`.
    split: Option<[Vec<Rational>; 2]>,
}

fn normalize(v: Vec<Rational>) -> Vec<Rational> {
    match v.iter().find(|x| !x.is_zero()).cloned() {
        Some(p) => v.into_iter().map(|x| x / &p).collect(),
        None => v,
    }
}

impl Restricted {
    fn new(gram: &Matrix, basis: &[Vec<Rational>]) -> Self {
        let gv: Vec<Vec<Rational>> = basis.iter().map(|b| linalg::mat_vec(gram, b)).collect();
        let g: Matrix = basis
            .iter()
            .map(|u| gv.iter().map(|w| u.iter().zip(w).map(|(a, b)| a * b).sum()).collect())
            .collect();
        let zero = g.iter().flatten().all(|x| x.is_zero());
        let rank = if zero { 0 } else { linalg::rank(&g) };
        let split = if zero || rank > 2 {
            None
        } else {
            match linalg::diagonalize_symmetric(&g).as_slice() {
                [(_, w)] => Some([normalize(w.clone()), normalize(w.clone())]),
                [(d1, w1), (d2, w2)] => rational::sqrt(&-(d2 / d1)).map(|s| {
                    let minus = w1.iter().zip(w2).map(|(a, b)| a - &s * b).collect();
                    let plus = w1.iter().zip(w2).map(|(a, b)| a + &s * b).collect();
                    let mut pair = [normalize(minus), normalize(plus)];
                    pair.sort();
                    pair
                }),
                _ => None,
            }
        };
        Self { gram: g, zero, rank, split }
    }

    fn proportional(&self, other: &Self) -> bool {
        let flat_a: Vec<&Rational> = self.gram.iter().flatten().collect();
        let flat_b: Vec<&Rational> = other.gram.iter().flatten().collect();
        let Some(p) = flat_a.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let ratio = flat_b[p] / flat_a[p];
        flat_a.iter().zip(&flat_b).all(|(a, b)| &(*a * &ratio) == *b)
    }

    /// Whether two nonzero restrictions share a factor over `C`.
    ///
    /// If either has rank at least 3 it is irreducible, so a common factor
    /// means proportionality. If both split over `Q`, compare factors. If one
    /// splits only over a quadratic field, its factors are a conjugate pair
    /// not defined over `Q`; a shared factor then forces the other form to
    /// contain its conjugate as well, so again the forms are proportional.
    fn shares_factor(&self, other: &Self) -> bool {
        if self.rank >= 3 || other.rank >= 3 {
            return self.proportional(other);
        }
        match (&self.split, &other.split) {
            (Some(a), Some(b)) => a.iter().any(|f| b.contains(f)),
            _ => self.proportional(other),
        }
    }
}

fn single_codim(t: usize, k: usize, q: &Restricted) -> Option<usize> {
    if q.zero {
        (k >= 1).then_some(t)
    } else {
        (k >= 2).then_some(t + 1)
    }
}

fn pair_codim(t: usize, k: usize, a: &Restricted, b: &Restricted) -> Option<usize> {
    if a.zero {
        return single_codim(t, k, b);
    }
    if b.zero {
        return single_codim(t, k, a);
    }
    if a.shares_factor(b) {
        (k >= 2).then_some(t + 1)
    } else {
        (k >= 3).then_some(t + 2)
    }
}

/// `(subset, lines)` for every subset of `{1..n-1}` and every choice of one
/// line per chosen `h_i`, in a fixed order.
fn line_choices(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for mask in 0..1usize << (n - 1) {
        let subset: Vec<usize> = (1..n).filter(|&i| eps_bit(mask, i)).collect();
        for pick in 0..1usize << subset.len() {
            let lines = subset.iter().enumerate().map(|(b, &i)| 2 * i - 1 + ((pick >> b) & 1)).collect();
            out.push((subset.clone(), lines));
        }
    }
    out
}

/// Runs C1 and C2.
pub fn check_codim(config: &ArrangementConfig) -> (CodimCheck, CodimCheck) {
    let n = config.n;
    if config.lines.len() != 2 * n + 2 {
        let reason = Some("the h_i are not given as products of lines".to_string());
        let mk = |name: &str| CodimCheck {
            name: name.into(),
            status: CheckStatus::CannotCertify,
            components_checked: 0,
            failures: Vec::new(),
            tightest: None,
            reason: reason.clone(),
        };
        return (mk("C1"), mk("C2"));
    }
    let grams: Vec<Vec<Matrix>> = (1..=2)
        .map(|j| (0..config.num_eps()).map(|e| config.g_form(j, e).gram_matrix().expect("quadric")).collect())
        .collect();
    let coeffs: Vec<Vec<Rational>> = config.lines.iter().map(|l| l.linear_coefficients().expect("linear")).collect();

    let per_choice: Vec<(Vec<CodimWitness>, Vec<CodimWitness>)> = line_choices(n)
        .into_par_iter()
        .map(|(subset, lines)| {
            let rows: Vec<Vec<Rational>> = lines.iter().map(|&k| coeffs[k - 1].clone()).collect();
            let basis = linalg::kernel(&rows, n + 1);
            let k = basis.len();
            let t = n + 1 - k;
            let c = subset.len();
            let restricted: Vec<Vec<Restricted>> =
                grams.iter().map(|row| row.iter().map(|g| Restricted::new(g, &basis)).collect()).collect();
            let witness = |quadrics: Vec<(usize, usize)>, codim, bound| CodimWitness {
                subset: subset.clone(),
                lines: lines.clone(),
                quadrics,
                codim,
                bound,
            };
            let mut c1 = Vec::new();
            for (j, row) in restricted.iter().enumerate() {
                for (eps, q) in row.iter().enumerate() {
                    c1.push(witness(vec![(j + 1, eps)], single_codim(t, k, q), c + 1));
                }
            }
            let mut c2 = Vec::new();
            for (e1, a) in restricted[0].iter().enumerate() {
                for (e2, b) in restricted[1].iter().enumerate() {
                    c2.push(witness(vec![(1, e1), (2, e2)], pair_codim(t, k, a, b), c + 2));
                }
            }
            (c1, c2)
        })
        .collect();

    let summarize = |name: &str, all: Vec<&CodimWitness>| {
        let failures: Vec<CodimWitness> = all.iter().filter(|w| !w.holds()).map(|w| (*w).clone()).collect();
        let tightest = all.iter().min_by_key(|w| w.slack(n)).map(|w| (*w).clone());
        CodimCheck {
            name: name.into(),
            status: if failures.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
            components_checked: all.len(),
            failures,
            tightest,
            reason: None,
        }
    };
    let c1 = summarize("C1", per_choice.iter().flat_map(|p| &p.0).collect());
    let c2 = summarize("C2", per_choice.iter().flat_map(|p| &p.1).collect());
    (c1, c2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolCheck {
    pub name: String,
    pub status: CheckStatus,
    /// Chain certificates for `j = 1, 2`, when they could be computed.
    pub chains: Vec<ResidueChainCertificate>,
    pub reason: Option<String>,
}

/// Runs C3: certifies `(a_1, .., a_{n-1}, b_j) != 0` for `j = 1, 2` by
/// residues along `l_{2n-2+2j}, l_{2n-2}, .., l_4`.
pub fn check_symbol_nonzero(config: &ArrangementConfig) -> SymbolCheck {
    let cannot = |reason: String| SymbolCheck {
        name: "C3".into(),
        status: CheckStatus::CannotCertify,
        chains: Vec::new(),
        reason: Some(reason),
    };
    let factors = match ArrangementFactors::new(config) {
        Ok(f) => f,
        Err(e) => return cannot(e.to_string()),
    };
    let mut chains = Vec::new();
    let mut failing = Vec::new();
    for j in 1..=2 {
        let mut entries: Vec<_> = (1..config.n).map(|i| factors.a_class(i)).collect();
        entries.push(factors.b_class(j));
        let alpha = CohClass::symbol(entries);
        let chain: Vec<_> = config.chain_line_indices(j).into_iter().map(|k| factors.line(k)).collect();
        match iterated_nonvanishing(&alpha, &factors.table, &chain) {
            Ok(cert) => {
                if cert.verdict != Verdict::Nonzero {
                    failing.push(j);
                }
                chains.push(cert);
            }
            Err(e) => return cannot(format!("residue chain for j = {j}: {e}")),
        }
    }
    SymbolCheck {
        name: "C3".into(),
        status: if failing.is_empty() { CheckStatus::Pass } else { CheckStatus::Fail },
        chains,
        reason: (!failing.is_empty()).then(|| format!("no nonvanishing certificate for j in {failing:?}")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipIdentity {
    pub j: usize,
    pub i: usize,
    /// `eps` with `eps_i = 0`; the identity is `g_{j,eps+e_i} - g_{j,eps} = h_i`.
    pub eps: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPropertyCheck {
    pub name: String,
    pub status: CheckStatus,
    /// `h_i = l_{2i-1} l_{2i}` and `g_{j0} = l_{2n-3+2j} l_{2n-2+2j}`, when
    /// lines are present: `(label, holds)`.
    pub construction: Vec<(String, bool)>,
    pub flips: Vec<FlipIdentity>,
    pub reason: Option<String>,
}

/// Runs C4. Pairing `eps` with `eps + e_i` writes `g_j` modulo `h_i` as the
/// square of `prod_{eps_i = 0} g_{j,eps}`.
pub fn check_key_property(config: &ArrangementConfig) -> KeyPropertyCheck {
    let n = config.n;
    let mut construction = Vec::new();
    if config.lines.len() == 2 * n + 2 {
        let prod = |a: usize| config.line(a).mul(config.line(a + 1)).ok();
        for i in 1..n {
            construction.push((format!("h_{i} = l_{} l_{}", 2 * i - 1, 2 * i), prod(2 * i - 1).as_ref() == Some(&config.h[i - 1])));
        }
        for j in 1..=2 {
            let a = 2 * n - 3 + 2 * j;
            construction.push((format!("g_({j},0) = l_{a} l_{}", a + 1), prod(a).as_ref() == Some(config.g_form(j, 0))));
        }
    }
    let mut flips = Vec::new();
    for j in 1..=2 {
        for i in 1..n {
            for eps in (0..config.num_eps()).filter(|&e| !eps_bit(e, i)) {
                let up = eps | 1 << (i - 1);
                let holds = config.g_form(j, up).sub(config.g_form(j, eps)).ok().as_ref() == Some(&config.h[i - 1]);
                flips.push(FlipIdentity { j, i, eps, holds });
            }
        }
    }
    let bad_construction: Vec<&str> = construction.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
    let bad_flips: Vec<String> =
        flips.iter().filter(|f| !f.holds).map(|f| format!("g_({},{}) - g_({},{}) != h_{}", f.j, f.eps | 1 << (f.i - 1), f.j, f.eps, f.i)).collect();
    let ok = bad_construction.is_empty() && bad_flips.is_empty();
    let reason = (!ok).then(|| {
        bad_construction.iter().map(|s| format!("{s} fails")).chain(bad_flips).collect::<Vec<_>>().join("; ")
    });
    KeyPropertyCheck {
        name: "C4".into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        construction,
        flips,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cto::DEFAULT_MAX_RESAMPLE;
    use crate::forms::HomogeneousForm;

    fn seeded(n: usize, seed: u64) -> ArrangementConfig {
        ArrangementConfig::generate(n, seed, DEFAULT_MAX_RESAMPLE).unwrap()
    }

    #[test]
    fn component_counts() {
        // n = 3: choices = 1 + 2 + 2 + 4 = 9; C1 has 8 quadrics, C2 16 pairs.
        let (c1, c2) = check_codim(&seeded(3, 1));
        assert_eq!(c1.components_checked, 9 * 8);
        assert_eq!(c2.components_checked, 9 * 16);
        assert_eq!(c1.status, CheckStatus::Pass);
        assert_eq!(c2.status, CheckStatus::Pass);
    }

    #[test]
    fn full_intersection_is_empty_for_n3() {
        // With both h_i and both g_j in the intersection the bound is 4 > 3,
        // so each such component must be empty in P^3.
        let (_, c2) = check_codim(&seeded(3, 2));
        assert_eq!(c2.status, CheckStatus::Pass);
        assert!(c2.tightest.unwrap().holds());
    }

    #[test]
    fn collision_l1_eq_l3_fails_c1() {
        let cfg = seeded(2, 5);
        let mut lines = cfg.lines.clone();
        lines[2] = lines[0].clone();
        let bad = ArrangementConfig::from_lines(2, 5, lines).unwrap();
        let (c1, _) = check_codim(&bad);
        assert_eq!(c1.status, CheckStatus::Fail);
        let w = &c1.failures[0];
        assert_eq!(w.subset, vec![1]);
        assert_eq!(w.lines, vec![1]);
        assert_eq!(w.codim, Some(1));
    }

    #[test]
    fn restricted_common_factor_cases() {
        // On P^1 (basis e0, e1 of a 2-dim V): x*y vs x*(x+y) share x.
        let basis = vec![vec![rational::int(1), rational::int(0)], vec![rational::int(0), rational::int(1)]];
        let q = |c: &[i64]| {
            let terms = [(vec![2, 0], c[0]), (vec![1, 1], c[1]), (vec![0, 2], c[2])];
            let f = HomogeneousForm::from_terms(1, 2, terms.into_iter().map(|(m, v)| (m, rational::int(v)))).unwrap();
            Restricted::new(&f.gram_matrix().unwrap(), &basis)
        };
        let xy = q(&[0, 1, 0]);
        let x_xy = q(&[1, 1, 0]);
        let sum_sq = q(&[1, 0, 1]); // x^2 + y^2: irrational split
        let twice = q(&[2, 0, 2]);
        assert!(xy.shares_factor(&x_xy));
        assert!(!xy.shares_factor(&sum_sq));
        assert!(sum_sq.shares_factor(&twice));
        assert_eq!(pair_codim(0, 2, &xy, &sum_sq), None);
        assert_eq!(pair_codim(0, 2, &xy, &x_xy), Some(1));
        assert_eq!(sum_sq.rank, 2);
        assert!(sum_sq.split.is_none());
    }

    #[test]
    fn symbols_certified_for_seeded_configs() {
        for (n, seed) in [(2, 1), (3, 1)] {
            let c3 = check_symbol_nonzero(&seeded(n, seed));
            assert_eq!(c3.status, CheckStatus::Pass, "{:?}", c3.reason);
            assert_eq!(c3.chains.len(), 2);
        }
    }

    #[test]
    fn l1_eq_l2_fails_c3() {
        let cfg = seeded(2, 4);
        let mut lines = cfg.lines.clone();
        lines[1] = lines[0].clone();
        let bad = ArrangementConfig::from_lines(2, 4, lines).unwrap();
        assert_eq!(check_symbol_nonzero(&bad).status, CheckStatus::Fail);
    }

    #[test]
    fn key_property_identities() {
        let c4 = check_key_property(&seeded(2, 1));
        assert_eq!(c4.status, CheckStatus::Pass);
        assert_eq!(c4.flips.len(), 2);
        let c4 = check_key_property(&seeded(3, 1));
        assert_eq!(c4.flips.iter().filter(|f| f.j == 1).count(), 4);
        let mut bad = seeded(2, 1);
        bad.g[0][1] = bad.g[0][1].add(&HomogeneousForm::variable(2, 1).pow(2)).unwrap();
        let c4 = check_key_property(&bad);
        assert_eq!(c4.status, CheckStatus::Fail);
        assert!(c4.reason.unwrap().contains("g_(1,1) - g_(1,0)"));
    }
}
