//! The arrangement: lines `l_1..l_{2n+2}`, the quadrics `h_i = l_{2i-1} l_{2i}`,
//! `g_{j0} = l_{2n-3+2j} l_{2n-2+2j}` and their translates
//! `g_{j,eps} = g_{j0} + sum_i eps_i h_i`.
//!
//! `eps in {0,1}^{n-1}` is encoded as an integer with `eps_i` in bit `i - 1`.

use serde::{Deserialize, Serialize};

use super::CtoError;
use crate::forms::HomogeneousForm;
use crate::linalg;
use crate::rational::{int, Rational};
use crate::rng::SplitMix64;

pub const DEFAULT_MAX_RESAMPLE: usize = 32;
pub const SCHEMA: &str = "cto/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementConfig {
    pub schema: String,
    pub n: usize,
    pub seed: u64,
    /// Rejected samples before this one was accepted.
    pub resamples: usize,
    /// `l_1..l_{2n+2}`; empty when the arrangement was given by its quadrics.
    pub lines: Vec<HomogeneousForm>,
    /// `h_1..h_{n-1}`.
    pub h: Vec<HomogeneousForm>,
    /// `g[j-1][eps] = g_{j,eps}`.
    pub g: [Vec<HomogeneousForm>; 2],
}

pub fn eps_bit(eps: usize, i: usize) -> bool {
    (eps >> (i - 1)) & 1 == 1
}

fn sample_lines(n: usize, rng: &mut SplitMix64) -> Vec<HomogeneousForm> {
    (1..=2 * n + 2)
        .map(|k| {
            // The first four lines live in x0, x1, x2 only.
            let support = if k <= 4 { 3.min(n + 1) } else { n + 1 };
            let coeffs: Vec<_> = (0..=n).map(|v| if v < support { rng.coefficient() } else { int(0) }).collect();
            HomogeneousForm::linear(&coeffs)
        })
        .collect()
}

impl ArrangementConfig {
    pub fn num_eps(&self) -> usize {
        1 << (self.n - 1)
    }

    /// Line `l_k`, 1-based.
    pub fn line(&self, k: usize) -> &HomogeneousForm {
        &self.lines[k - 1]
    }

    pub fn g_form(&self, j: usize, eps: usize) -> &HomogeneousForm {
        &self.g[j - 1][eps]
    }

    /// Half the common degree of the `h_i` and `g_{j,eps}`.
    pub fn half_degree(&self) -> u32 {
        self.h.first().map_or(self.g[0][0].degree(), |h| h.degree()) / 2
    }

    /// Builds the quadrics from explicit lines. Performs no genericity checks,
    /// so degenerate arrangements can be constructed on purpose.
    pub fn from_lines(n: usize, seed: u64, lines: Vec<HomogeneousForm>) -> Result<Self, CtoError> {
        if n < 2 {
            return Err(CtoError::InvalidN(n));
        }
        if lines.len() != 2 * n + 2 || lines.iter().any(|l| l.degree() != 1 || l.ambient_dim() != n) {
            return Err(CtoError::Shape(format!("expected {} linear forms on P^{n}", 2 * n + 2)));
        }
        let h: Vec<HomogeneousForm> =
            (1..n).map(|i| lines[2 * i - 2].mul(&lines[2 * i - 1])).collect::<Result<_, _>>()?;
        let g0 = [
            lines[2 * n - 2].mul(&lines[2 * n - 1])?,
            lines[2 * n].mul(&lines[2 * n + 1])?,
        ];
        let mut cfg = Self::from_quadrics(n, h, g0)?;
        cfg.seed = seed;
        cfg.lines = lines;
        Ok(cfg)
    }

    /// Arrangement from arbitrary forms `h_i`, `g_{j0}` of one even degree.
    pub fn from_quadrics(n: usize, h: Vec<HomogeneousForm>, g0: [HomogeneousForm; 2]) -> Result<Self, CtoError> {
        if n < 2 {
            return Err(CtoError::InvalidN(n));
        }
        let degree = g0[0].degree();
        if h.len() != n - 1
            || degree % 2 != 0
            || degree == 0
            || h.iter().chain(g0.iter()).any(|f| f.degree() != degree || f.ambient_dim() != n)
        {
            return Err(CtoError::Shape(format!("expected {} forms of one even degree on P^{n}", n + 1)));
        }
        let count = 1usize << (n - 1);
        let mut g: [Vec<HomogeneousForm>; 2] = [Vec::with_capacity(count), Vec::with_capacity(count)];
        for j in 0..2 {
            for eps in 0..count {
                let mut f = g0[j].clone();
                for i in 1..n {
                    if eps_bit(eps, i) {
                        f = f.add(&h[i - 1])?;
                    }
                }
                g[j].push(f);
            }
        }
        Ok(Self { schema: SCHEMA.to_string(), n, seed: 0, resamples: 0, lines: Vec::new(), h, g })
    }

    /// Checks the sampled arrangement is general enough for the verifier:
    /// lines pairwise non-proportional and not proportional to `x0`, every
    /// set of at most `n + 2` lines of the largest rank its supports allow,
    /// the translates `g_{j,eps}` with `eps != 0` of rank at least 3, all
    /// `g_{j,eps}` pairwise non-proportional, and `x0` not vanishing on either
    /// residue chain's intersection. Returns the first violated condition.
    pub fn genericity_violation(&self) -> Option<String> {
        let x0 = HomogeneousForm::variable(self.n, 0);
        for (a, la) in self.lines.iter().enumerate() {
            if la.is_zero() || la.is_proportional(&x0) {
                return Some(format!("l_{} is zero or proportional to x0", a + 1));
            }
            for (b, lb) in self.lines.iter().enumerate().skip(a + 1) {
                if la.is_proportional(lb) {
                    return Some(format!("l_{} and l_{} are proportional", a + 1, b + 1));
                }
            }
        }
        if let Some(bad) = self.dependent_lines() {
            return Some(format!("lines {bad:?} are linearly dependent beyond their supports"));
        }
        let mut all = Vec::new();
        for j in 1..=2 {
            for eps in 0..self.num_eps() {
                let g = self.g_form(j, eps);
                if eps != 0 && g.quadric_rank().map_or(true, |r| r < 3) {
                    return Some(format!("g_({j},{eps}) has rank below 3"));
                }
                if let Some((jj, ee)) = all.iter().find(|(_, _, f): &&(usize, usize, &HomogeneousForm)| f.is_proportional(g)).map(|(a, b, _)| (*a, *b)) {
                    return Some(format!("g_({j},{eps}) is proportional to g_({jj},{ee})"));
                }
                all.push((j, eps, g));
            }
        }
        for j in 1..=2 {
            let mut rows = vec![x0.linear_coefficients().unwrap()];
            for id in self.chain_line_indices(j) {
                rows.push(self.line(id).linear_coefficients().unwrap());
            }
            if linalg::rank(&rows) != rows.len() {
                return Some(format!("x0 vanishes on the chain intersection for j = {j}"));
            }
        }
        None
    }

    /// First set of at most `n + 2` lines (1-based) whose rank is below
    /// `min(n + 1, min(#{k <= 4}, 3) + #{k > 4})`, the generic rank given
    /// that `l_1..l_4` only involve `x0, x1, x2`.
    fn dependent_lines(&self) -> Option<Vec<usize>> {
        let coeffs: Vec<Vec<Rational>> = self.lines.iter().map(|l| l.linear_coefficients().unwrap()).collect();
        let count = coeffs.len();
        (1u32..1 << count).filter(|m| (m.count_ones() as usize) <= self.n + 2).find_map(|mask| {
            let set: Vec<usize> = (0..count).filter(|k| mask >> k & 1 == 1).collect();
            let planar = set.iter().filter(|&&k| k < 4).count();
            let generic = (self.n + 1).min(planar.min(3) + set.len() - planar);
            let rows: Vec<Vec<Rational>> = set.iter().map(|&k| coeffs[k].clone()).collect();
            (linalg::rank(&rows) < generic).then(|| set.iter().map(|k| k + 1).collect())
        })
    }

    /// 1-based line indices of the residue chain for `alpha_j`, in the order
    /// the residues are taken: `l_{2n-2+2j}`, then `l_{2n-2}, ..., l_4`.
    pub fn chain_line_indices(&self, j: usize) -> Vec<usize> {
        let mut out = vec![2 * self.n - 2 + 2 * j];
        out.extend((2..self.n).rev().map(|i| 2 * i));
        out
    }

    /// Samples lines from the seeded stream until the arrangement is general,
    /// allowing `max_resample` rejections.
    pub fn generate(n: usize, seed: u64, max_resample: usize) -> Result<Self, CtoError> {
        if n < 2 {
            return Err(CtoError::InvalidN(n));
        }
        let mut rng = SplitMix64::new(seed);
        for attempt in 0..=max_resample {
            let lines = sample_lines(n, &mut rng);
            let mut cfg = Self::from_lines(n, seed, lines)?;
            if cfg.genericity_violation().is_none() {
                cfg.resamples = attempt;
                return Ok(cfg);
            }
        }
        Err(CtoError::ResampleExhausted { attempts: max_resample + 1 })
    }
}

/// The bijection `phi: {0,1}^n -> {0..2^n - 1}` built from `phi'` on
/// `{0,1}^{n-1}` by `phi(eps, eps_n) = phi'(eps) + eps_n 2^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMap {
    pub n: usize,
    /// `order[k]` is the `eps` with `phi'(eps) = k`.
    pub order: Vec<usize>,
}

impl IndexMap {
    /// `phi'` ordering `eps` by length, then by integer value. This order
    /// already puts `e_1`, `e_2` at positions 1, 2 and `e_1 + e_2` at
    /// position `n`.
    pub fn natural(n: usize) -> Self {
        let mut order: Vec<usize> = (0..1usize << (n - 1)).collect();
        order.sort_by_key(|&e| (e.count_ones(), e));
        Self { n, order }
    }

    pub fn len(&self) -> usize {
        2 * self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `(eps, eps_n)` at ledger index `i`.
    pub fn inverse(&self, i: usize) -> (usize, bool) {
        let half = self.order.len();
        (self.order[i % half], i >= half)
    }

    pub fn phi(&self, eps: usize, top: bool) -> usize {
        let pos = self.order.iter().position(|&e| e == eps).expect("eps in range");
        pos + if top { self.order.len() } else { 0 }
    }

    /// Bijectivity, length-monotonicity and, for `n >= 3`, the pins
    /// `c_1 = h_1`, `c_2 = h_2`, `c_n = h_1 h_2`.
    pub fn validate(&self) -> Result<(), CtoError> {
        let half = 1usize << (self.n - 1);
        let mut seen = self.order.clone();
        seen.sort_unstable();
        if seen != (0..half).collect::<Vec<_>>() {
            return Err(CtoError::InvalidIndexMap("not a bijection".into()));
        }
        if self.order.windows(2).any(|w| w[0].count_ones() > w[1].count_ones()) {
            return Err(CtoError::InvalidIndexMap("not monotone in length".into()));
        }
        if self.n >= 3 && (self.order[1] != 0b1 || self.order[2] != 0b10 || self.order[self.n] != 0b11) {
            return Err(CtoError::InvalidIndexMap("pins c_1 = h_1, c_2 = h_2, c_n = h_1 h_2 violated".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_shaped() {
        let a = ArrangementConfig::generate(2, 7, DEFAULT_MAX_RESAMPLE).unwrap();
        let b = ArrangementConfig::generate(2, 7, DEFAULT_MAX_RESAMPLE).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lines.len(), 6);
        assert_eq!(a.g[0].len(), 2);
        assert!(matches!(ArrangementConfig::generate(1, 7, 4), Err(CtoError::InvalidN(1))));
        let c = ArrangementConfig::generate(4, 3, DEFAULT_MAX_RESAMPLE).unwrap();
        for k in 1..=4 {
            assert!(c.line(k).support().iter().all(|&v| v <= 2));
        }
    }

    #[test]
    fn translates_differ_by_h() {
        let cfg = ArrangementConfig::generate(3, 1, DEFAULT_MAX_RESAMPLE).unwrap();
        let d = cfg.g_form(1, 0b01).sub(cfg.g_form(1, 0)).unwrap();
        assert_eq!(d, cfg.h[0]);
        assert_eq!(cfg.g_form(2, 0b11).sub(cfg.g_form(2, 0b10)).unwrap(), cfg.h[0]);
    }

    #[test]
    fn chains() {
        let cfg = ArrangementConfig::generate(4, 1, DEFAULT_MAX_RESAMPLE).unwrap();
        assert_eq!(cfg.chain_line_indices(1), vec![8, 6, 4]);
        assert_eq!(cfg.chain_line_indices(2), vec![10, 6, 4]);
        let cfg = ArrangementConfig::generate(2, 1, DEFAULT_MAX_RESAMPLE).unwrap();
        assert_eq!(cfg.chain_line_indices(1), vec![4]);
        assert_eq!(cfg.chain_line_indices(2), vec![6]);
    }

    #[test]
    fn natural_index_map_satisfies_pins() {
        for n in 2..=7 {
            let m = IndexMap::natural(n);
            m.validate().unwrap();
            for i in 0..m.len() {
                let (eps, top) = m.inverse(i);
                assert_eq!(m.phi(eps, top), i);
            }
        }
        let bad = IndexMap { n: 3, order: vec![0, 2, 1, 3] };
        assert!(bad.validate().is_err());
    }
}
