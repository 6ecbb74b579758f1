//! Parameter regions for `r`-fold quadric bundles over `n`-dimensional bases.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdFlag {
    pub name: String,
    /// What the threshold is about, in words.
    pub citation: String,
    pub threshold: u64,
    /// Whether `(n, r)` lies in the range where the threshold applies.
    pub applicable: bool,
    /// Whether the given `d` meets the threshold; `None` without `d` or
    /// outside the range.
    pub met: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub n: u64,
    pub r: u64,
    pub d: Option<u64>,
    /// The unique `k` with `2^{k-1} - 1 <= r <= 2^k - 2`.
    pub k: u32,
    /// `r <= 2^n - 2`: stably irrational smooth unirational bundles exist
    /// over `P^{n-k} x P^k`.
    pub nonrational_examples_exist: bool,
    /// `r > 2^n - 2`: every such bundle is rational by Lang's theorem.
    pub lang_rational: bool,
    /// `2^{n-1} - 1 <= r <= 2^n - 2`, the range of the degree thresholds.
    pub in_threshold_range: bool,
    /// `r >= n`: every type has a rational smooth member.
    pub rational_deformation_type: bool,
    pub flags: Vec<ThresholdFlag>,
}

/// `k` with `2^{k-1} - 1 <= r <= 2^k - 2`, i.e. `k = floor(log2(r + 1)) + 1`.
pub fn fibre_dimension_level(r: u64) -> u32 {
    assert!(r >= 1, "r must be positive");
    64 - (r + 1).leading_zeros()
}

fn pow2(e: u64) -> Option<u64> {
    1u64.checked_shl(u32::try_from(e).ok()?)
}

/// Threshold degrees, in the order they are reported.
pub fn thresholds(n: u64, r: u64) -> [(&'static str, &'static str, u64); 5] {
    let p = pow2(n).unwrap_or(u64::MAX);
    [
        ("type_degree", "very general bundles of type (d_i) with all d_i >= 2^n + n - 1 are not stably rational", p.saturating_add(n).saturating_sub(1)),
        (
            "singular_hypersurface",
            "very general hypersurfaces in P^(n+r+1) of degree d >= 2^n + n + 1 with multiplicity d - 2 along an r-plane are not stably rational",
            p.saturating_add(n + 1),
        ),
        ("bidegree", "very general hypersurfaces in P^n x P^(r+1) of bidegree (d, 2) with d >= 2^n + n - 1 are not stably rational", p.saturating_add(n).saturating_sub(1)),
        (
            "double_cover",
            "double covers of P^(n+r) branched along a very general hypersurface of even degree d >= 2^(n+1) + 2n - 2 with multiplicity d - 2 along an (r-1)-plane are not stably rational (n >= 2)",
            p.saturating_mul(2).saturating_add(2 * n).saturating_sub(2),
        ),
        (
            "family",
            "smooth families degenerating over degree-d hypersurfaces with d >= 2(n + r)(r + 2), d even when r is even, have stably irrational very general members and unirational fibres (n >= 2)",
            2 * (n + r) * (r + 2),
        ),
    ]
}

pub fn classify(n: u64, r: u64, d: Option<u64>) -> ClassificationReport {
    assert!(n >= 1 && r >= 1, "n and r must be positive");
    let top = pow2(n).map_or(u64::MAX, |p| p - 2);
    let bottom = pow2(n - 1).map_or(u64::MAX, |p| p - 1);
    let in_range = bottom <= r && r <= top;
    let flags = thresholds(n, r)
        .into_iter()
        .map(|(name, citation, threshold)| {
            let applicable = in_range && (n >= 2 || !matches!(name, "double_cover" | "family"));
            let met = d.filter(|_| applicable).map(|d| {
                d >= threshold
                    && match name {
                        "double_cover" => d % 2 == 0,
                        "family" => r % 2 == 1 || d % 2 == 0,
                        _ => true,
                    }
            });
            ThresholdFlag { name: name.into(), citation: citation.into(), threshold, applicable, met }
        })
        .collect();
    ClassificationReport {
        schema: "classify/1".into(),
        n,
        r,
        d,
        k: fibre_dimension_level(r),
        nonrational_examples_exist: r <= top,
        lang_rational: r > top,
        in_threshold_range: in_range,
        rational_deformation_type: r >= n,
        flags,
    }
}
