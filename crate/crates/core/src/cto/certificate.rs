use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::checks::{
    check_codim, check_key_property, check_symbol_nonzero, CheckStatus, CodimCheck, KeyPropertyCheck, SymbolCheck,
};
use super::config::{eps_bit, ArrangementConfig, IndexMap, SCHEMA};
use super::ledger::{build_ledger, ArrangementFactors, Family};
use super::CtoError;
use crate::bundles::{unirationality_from_ledger, UnirationalityRecord};
use crate::square_classes::{FactorTable, SquareClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CtoVerdict {
    Certified,
    Failed,
    CannotCertify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtoCertificate {
    pub schema: String,
    /// SHA-256 of the compact JSON of `config`.
    pub config_hash: String,
    pub config: ArrangementConfig,
    /// Factor table the symbol check ran on, when the lines could be registered.
    pub factor_table: Option<FactorTable>,
    pub c1: CodimCheck,
    pub c2: CodimCheck,
    pub c3: SymbolCheck,
    pub c4: KeyPropertyCheck,
    /// Applicability of the unirationality criterion to the `c` family.
    pub unirationality: Option<UnirationalityRecord>,
    /// What follows from the verified checks; supplied by theory, not computed.
    pub conclusion: String,
    pub verdict: CtoVerdict,
}

impl CtoCertificate {
    /// Names of the checks that did not pass.
    pub fn failing_checks(&self) -> Vec<&str> {
        [
            (self.c1.name.as_str(), self.c1.status),
            (self.c2.name.as_str(), self.c2.status),
            (self.c3.name.as_str(), self.c3.status),
            (self.c4.name.as_str(), self.c4.status),
        ]
        .into_iter()
        .filter(|(_, s)| *s != CheckStatus::Pass)
        .map(|(name, _)| name)
        .collect()
    }
}

pub fn config_hash(config: &ArrangementConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

const CONCLUSION_CERTIFIED: &str = "Checked exactly: the codimension bounds C1 and C2 on every component, \
nonvanishing of (a_1, ..., a_{n-1}, b_1) and (a_1, ..., a_{n-1}, b_2) by residue chains (C3), and the flip \
identities making g_j a square modulo each h_i (C4). Supplied by theory from these hypotheses: every Pfister \
neighbour of <<a_1, ..., a_{n-1}, b_1 b_2>> is a CTO type quadric over K, i.e. both symbols are nonzero and at \
every geometric valuation at least one of them has zero residue; the pullback of (a_1, ..., a_{n-1}, b_1) is then \
a nonzero unramified class.";

/// Runs C1 through C4 and assembles the certificate.
pub fn verify_cto(config: &ArrangementConfig) -> Result<CtoCertificate, CtoError> {
    if config.schema != SCHEMA {
        return Err(CtoError::Schema(config.schema.clone()));
    }
    let n = config.n;
    if n < 2 {
        return Err(CtoError::InvalidN(n));
    }
    let count = 1usize << (n - 1);
    let shapes_ok = config.h.len() == n - 1
        && config.g.iter().all(|row| row.len() == count)
        && config.h.iter().chain(config.g.iter().flatten()).chain(&config.lines).all(|f| f.ambient_dim() == n);
    if !shapes_ok {
        return Err(CtoError::Shape("form counts or ambient dimensions do not match n".into()));
    }

    let (c1, c2) = check_codim(config);
    let c3 = check_symbol_nonzero(config);
    let c4 = check_key_property(config);
    let statuses = [c1.status, c2.status, c3.status, c4.status];
    let verdict = if statuses.iter().all(|s| *s == CheckStatus::Pass) {
        CtoVerdict::Certified
    } else if statuses.contains(&CheckStatus::Fail) {
        CtoVerdict::Failed
    } else {
        CtoVerdict::CannotCertify
    };
    let factor_table = ArrangementFactors::new(config).ok().map(|f| f.table);
    let unirationality = build_ledger(config, &IndexMap::natural(n))
        .ok()
        .map(|ledger| unirationality_from_ledger(&ledger, Family::C));
    let conclusion = match verdict {
        CtoVerdict::Certified => CONCLUSION_CERTIFIED.to_string(),
        _ => "No conclusion: at least one hypothesis was not verified.".to_string(),
    };
    Ok(CtoCertificate {
        schema: SCHEMA.to_string(),
        config_hash: config_hash(config),
        config: config.clone(),
        factor_table,
        c1,
        c2,
        c3,
        c4,
        unirationality,
        conclusion,
        verdict,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfisterEntries {
    /// `prod a_i^{eps_i} (b_1 b_2)^{eps_n}` in `phi` order.
    pub entries: Vec<SquareClass>,
    /// Indices where the entry differs from the class of `c_i`.
    pub mismatches: Vec<usize>,
}

impl PfisterEntries {
    pub fn consistent(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The diagonal entries of `<<a_1, ..., a_{n-1}, b_1 b_2>>` as classes,
/// compared against the `c` family of the ledger.
pub fn pfister_entries(config: &ArrangementConfig, map: &IndexMap) -> Result<PfisterEntries, CtoError> {
    let ledger = build_ledger(config, map)?;
    let factors = &ledger.factors;
    let b12 = factors.b_class(1).mul(&factors.b_class(2));
    let mut entries = Vec::with_capacity(map.len());
    let mut mismatches = Vec::new();
    for index in 0..map.len() {
        let (eps, top) = map.inverse(index);
        let mut class = if top { b12.clone() } else { SquareClass::trivial() };
        for i in 1..config.n {
            if eps_bit(eps, i) {
                class = class.mul(&factors.a_class(i));
            }
        }
        if class != factors.table.class_of(&ledger.c[index]) {
            mismatches.push(index);
        }
        entries.push(class);
    }
    Ok(PfisterEntries { entries, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cto::DEFAULT_MAX_RESAMPLE;

    #[test]
    fn seeded_n2_and_n3_certify_and_round_trip() {
        for n in [2, 3] {
            let cfg = ArrangementConfig::generate(n, 42, DEFAULT_MAX_RESAMPLE).unwrap();
            let cert = verify_cto(&cfg).unwrap();
            assert_eq!(cert.verdict, CtoVerdict::Certified, "{:?}", cert.failing_checks());
            let json = serde_json::to_string(&cert).unwrap();
            let back: CtoCertificate = serde_json::from_str(&json).unwrap();
            assert_eq!(back, cert);
            assert_eq!(cert.config_hash, config_hash(&back.config));
        }
    }

    #[test]
    fn perturbed_g11_fails_c4_only_check_named() {
        let mut cfg = ArrangementConfig::generate(2, 9, DEFAULT_MAX_RESAMPLE).unwrap();
        cfg.g[0][1] = cfg.g[0][1].add(&crate::forms::HomogeneousForm::variable(2, 0).pow(2)).unwrap();
        let cert = verify_cto(&cfg).unwrap();
        assert_eq!(cert.verdict, CtoVerdict::Failed);
        assert!(cert.failing_checks().contains(&"C4"));
    }

    #[test]
    fn pfister_entries_match_c_family() {
        let cfg = ArrangementConfig::generate(2, 3, DEFAULT_MAX_RESAMPLE).unwrap();
        let p = pfister_entries(&cfg, &IndexMap::natural(2)).unwrap();
        assert!(p.consistent());
        assert!(p.entries[0].is_trivial());
        let f = ArrangementFactors::new(&cfg).unwrap();
        let h1g1g2 = f.h[0].mul(&f.g_product(1)).mul(&f.g_product(2));
        assert_eq!(p.entries[3], f.table.class_of(&h1g1g2));
        let cfg = ArrangementConfig::generate(4, 3, DEFAULT_MAX_RESAMPLE).unwrap();
        assert!(pfister_entries(&cfg, &IndexMap::natural(4)).unwrap().consistent());
    }

    #[test]
    fn schema_is_checked() {
        let mut cfg = ArrangementConfig::generate(2, 3, DEFAULT_MAX_RESAMPLE).unwrap();
        cfg.schema = "cto/0".into();
        assert!(matches!(verify_cto(&cfg), Err(CtoError::Schema(_))));
    }
}
