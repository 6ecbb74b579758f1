//! Best-effort search for singular points of `sum a_ij(x) z_i z_j = 0`.
//!
//! Points are sampled on the chart `x_0 = 1` with small integer coordinates.
//! On the `z`-chart `z_c = 1` the `z`-partials vanish together with the
//! polynomial iff `A(x) z = 0`, so candidates are kernel vectors of `A(x)`,
//! which are then tested against `z^T (dA/dx_k)(x) z = 0` for `k = 1..n`.
//! Finding nothing says nothing about smoothness.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::types::BundleMatrix;
use crate::linalg;
use crate::rational::{self, int, Rational};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityWitness {
    pub sample: usize,
    /// Base point with `x_0 = 1`.
    pub x: Vec<String>,
    /// Fibre point, scaled so that its first nonzero coordinate is 1.
    pub z: Vec<String>,
    /// Index `c` of the `z`-chart `z_c = 1` containing the point.
    pub z_chart: usize,
}

fn quadratic(m: &[Vec<Rational>], z: &[Rational]) -> Rational {
    linalg::mat_vec(m, z).iter().zip(z).map(|(a, b)| a * b).sum()
}

fn check_point(a: &BundleMatrix, sample: usize, x: &[Rational]) -> Option<SingularityWitness> {
    let n = a.bundle_type().n;
    let value = a.evaluate(x);
    let kernel = linalg::kernel(&value, a.size());
    if kernel.is_empty() {
        return None;
    }
    let partials: Vec<_> = (1..=n).map(|k| a.evaluate_partial(k, x)).collect();
    // Basis vectors and pairwise sums: enough for planted degenerations.
    let mut candidates = kernel.clone();
    for i in 0..kernel.len() {
        for j in i + 1..kernel.len() {
            candidates.push(kernel[i].iter().zip(&kernel[j]).map(|(p, q)| p + q).collect());
        }
    }
    candidates.into_iter().find_map(|z| {
        if !partials.iter().all(|d| quadratic(d, &z).is_zero()) {
            return None;
        }
        let chart = z.iter().position(|v| !v.is_zero())?;
        let lead = z[chart].clone();
        let z: Vec<Rational> = z.iter().map(|v| v / &lead).collect();
        debug_assert!(a.chart_value(x, &z).is_zero());
        Some(SingularityWitness {
            sample,
            x: x.iter().map(rational::to_wire).collect(),
            z: z.iter().map(rational::to_wire).collect(),
            z_chart: chart,
        })
    })
}

/// Tests `sample_count` seeded base points; returns all witnesses found, in
/// sample order.
pub fn singularity_witness_search(a: &BundleMatrix, sample_count: usize, seed: u64) -> Vec<SingularityWitness> {
    let n = a.bundle_type().n;
    let mut rng = SplitMix64::new(seed);
    let points: Vec<Vec<Rational>> = (0..sample_count)
        .map(|_| std::iter::once(int(1)).chain((0..n).map(|_| int(rng.range_i64(-2, 2)))).collect())
        .collect();
    points.par_iter().enumerate().filter_map(|(s, x)| check_point(a, s, x)).collect()
}
