use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use quadric_cto::bundles::{
    self, check_range, double_cover_branch, from_double_cover, from_singular_hypersurface, matrix_from_branch,
    matrix_from_hypersurface, padded_diagonal, reconstruct_hypersurface, unirationality_from_ledger, BundleError,
    BundleMatrix, ClassificationReport, DiagonalModel, UnirationalityRecord,
};
use quadric_cto::cohomology::{self, CohClass, CohError};
use quadric_cto::cto::{
    build_ledger, verify_cto, ArrangementConfig, CoefficientLedger, CtoError, CtoVerdict, Family, IndexMap,
};
use quadric_cto::forms::HomogeneousForm;
use quadric_cto::square_classes::{FactorId, FactorTable, FactoredForm, SquareClass};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::output::{emit, to_json, RunManifest};

const BUNDLE_SCHEMA: &str = "bundle/1";
const RESIDUE_SCHEMA: &str = "residue/1";
const CLASSIFY_SCHEMA: &str = "classify/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cto(#[from] CtoError),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("cannot certify: {0}")]
    CannotCertify(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 0 is success; 1 is a usage, input or I/O problem; 2 means the run
    /// completed but could not certify.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CannotCertify(_)
            | CliError::Cto(CtoError::ResampleExhausted { .. })
            | CliError::Bundle(BundleError::Cto(CtoError::ResampleExhausted { .. })) => 2,
            _ => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

#[derive(Serialize)]
struct ConstructOutput<'a> {
    schema: &'static str,
    kind: &'static str,
    variant: &'static str,
    r: usize,
    config: &'a ArrangementConfig,
    ledger: &'a CoefficientLedger,
    model: &'a DiagonalModel,
    unirationality: &'a UnirationalityRecord,
}

pub fn construct(
    n: usize,
    r: usize,
    family: Family,
    seed: u64,
    max_resample: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let started = Instant::now();
    check_range(n, r)?;
    let config = ArrangementConfig::generate(n, seed, max_resample)?;
    let ledger = build_ledger(&config, &IndexMap::natural(n))?;
    let degrees = ledger.degrees(family)[..r + 2].to_vec();
    // Exact family degrees, so the padding line never occurs in an entry.
    let line = HomogeneousForm::linear_i64(&vec![1; n + 1]);
    let model = padded_diagonal(&ledger, family, r, &degrees, &line)?;
    let unirationality = unirationality_from_ledger(&ledger, family);
    let artifact = ConstructOutput {
        schema: BUNDLE_SCHEMA,
        kind: "diagonal",
        variant: family.name(),
        r,
        config: &config,
        ledger: &ledger,
        model: &model,
        unirationality: &unirationality,
    };
    let mut manifest = RunManifest::new("construct", BUNDLE_SCHEMA)
        .flag("n", n)
        .flag("r", r)
        .flag("variant", family.name())
        .flag("seed", seed)
        .flag("max-resample", max_resample);
    manifest.seed = Some(seed);
    manifest.n = Some(n as u64);
    manifest.r = Some(r as u64);
    manifest.variant = Some(family.name());
    manifest.outcome = "constructed".into();
    let summary = format!(
        "construct: n = {n}, r = {r}, variant {}, seed {seed}: degrees {degrees:?}, {} resample(s)",
        family.name(),
        config.resamples
    );
    emit(&artifact, manifest, out, started, &summary)?;
    Ok(())
}

pub enum ConfigSource {
    File(PathBuf),
    Seeded { n: usize, seed: u64, max_resample: usize },
}

/// Accepts a bare config or any document carrying one under `config`.
fn parse_config(text: &str) -> Result<ArrangementConfig, CliError> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))?;
    if let Some(inner) = value.get_mut("config") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Malformed(e.to_string()))
}

pub fn verify(source: ConfigSource, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest::new("verify", quadric_cto::cto::SCHEMA);
    let config = match &source {
        ConfigSource::File(path) => {
            manifest = manifest.flag("config", path.display());
            parse_config(&read(path)?)?
        }
        ConfigSource::Seeded { n, seed, max_resample } => {
            manifest = manifest.flag("n", n).flag("seed", seed).flag("max-resample", max_resample);
            manifest.seed = Some(*seed);
            ArrangementConfig::generate(*n, *seed, *max_resample)?
        }
    };
    manifest.n = Some(config.n as u64);
    let cert = verify_cto(&config)?;
    let failing = cert.failing_checks().join(", ");
    manifest.outcome = serde_json::to_value(cert.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let summary = match cert.verdict {
        CtoVerdict::Certified => format!("verify: n = {}: certified (C1-C4 pass)", config.n),
        _ => format!("verify: n = {}: {}; failing: {failing}", config.n, manifest.outcome),
    };
    let verdict = cert.verdict;
    emit(&cert, manifest, out, started, &summary)?;
    match verdict {
        CtoVerdict::Certified => Ok(()),
        CtoVerdict::Failed => Err(CliError::CannotCertify(format!("failing checks: {failing}"))),
        CtoVerdict::CannotCertify => Err(CliError::CannotCertify(format!("undecided checks: {failing}"))),
    }
}

pub fn classify(n: u64, r: u64, d: Option<u64>, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    if n == 0 || r == 0 {
        return Err(CliError::Usage("n and r must be positive".into()));
    }
    let report: ClassificationReport = bundles::classify(n, r, d);
    debug_assert_eq!(report.schema, CLASSIFY_SCHEMA);
    let mut manifest = RunManifest::new("classify", CLASSIFY_SCHEMA).flag("n", n).flag("r", r);
    if let Some(d) = d {
        manifest = manifest.flag("d", d);
    }
    manifest.n = Some(n);
    manifest.r = Some(r);
    manifest.outcome = "classified".into();
    let mut summary = format!(
        "classify: n = {n}, r = {r}: k = {}, threshold range {}, Lang-rational {}",
        report.k, report.in_threshold_range, report.lang_rational
    );
    for flag in report.flags.iter().filter(|f| f.applicable) {
        let met = flag.met.map_or(String::new(), |m| format!(", met: {m}"));
        summary.push_str(&format!("\n  {}: d >= {}{met}", flag.name, flag.threshold));
    }
    emit(&report, manifest, out, started, &summary)?;
    Ok(())
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct ModelOutput {
    schema: String,
    kind: String,
    n: usize,
    r: usize,
    d: u32,
    seed: u64,
    /// The hypersurface on `P^{n+r+1}` or the branch form on `P^{n+r}`.
    form: HomogeneousForm,
    matrix: BundleMatrix,
    round_trip: bool,
}

/// Writes a model after checking that it survives serialization unchanged.
fn emit_model(artifact: ModelOutput, manifest: RunManifest, out: Option<&Path>, started: Instant) -> Result<(), CliError> {
    let text = to_json(&artifact)?;
    let back: ModelOutput = serde_json::from_str(&text).map_err(|e| CliError::Internal(e.to_string()))?;
    if back != artifact {
        return Err(CliError::CannotCertify("model changed under a JSON round trip".into()));
    }
    let summary = format!(
        "{}: n = {}, r = {}, d = {}, seed {}: type {:?}, round trip exact",
        artifact.kind,
        artifact.n,
        artifact.r,
        artifact.d,
        artifact.seed,
        artifact.matrix.bundle_type().degrees
    );
    emit(&artifact, manifest, out, started, &summary)?;
    Ok(())
}

fn model_manifest(command: &'static str, n: usize, r: usize, d: u32, seed: u64) -> RunManifest {
    let mut m = RunManifest::new(command, BUNDLE_SCHEMA).flag("n", n).flag("r", r).flag("d", d).flag("seed", seed);
    m.seed = Some(seed);
    m.n = Some(n as u64);
    m.r = Some(r as u64);
    m.outcome = "round trip exact".into();
    m
}

pub fn hypersurface(n: usize, r: usize, d: u32, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let model = from_singular_hypersurface(n, r, d, seed)?;
    let exact = reconstruct_hypersurface(&model.matrix)? == model.hypersurface
        && matrix_from_hypersurface(&model.hypersurface, n, r)? == model.matrix;
    if !exact {
        return Err(CliError::CannotCertify("hypersurface and matrix do not round trip".into()));
    }
    let artifact = ModelOutput {
        schema: BUNDLE_SCHEMA.into(),
        kind: "hypersurface".into(),
        n,
        r,
        d,
        seed,
        form: model.hypersurface,
        matrix: model.matrix,
        round_trip: true,
    };
    emit_model(artifact, model_manifest("hypersurface", n, r, d, seed), out, started)
}

pub fn double_cover(n: usize, r: usize, d: u32, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let matrix = from_double_cover(n, r, d, seed)?;
    let branch = double_cover_branch(&matrix)?;
    if matrix_from_branch(&branch, n, r)? != matrix {
        return Err(CliError::CannotCertify("branch form and matrix do not round trip".into()));
    }
    let artifact = ModelOutput {
        schema: BUNDLE_SCHEMA.into(),
        kind: "double_cover".into(),
        n,
        r,
        d,
        seed,
        form: branch,
        matrix,
        round_trip: true,
    };
    emit_model(artifact, model_manifest("doublecover", n, r, d, seed), out, started)
}

/// Input of `residue`. Factors are either polynomial strings on `P^n`, each
/// registered in order, or a ready factor table whose ids are used as is.
/// Each symbol is a list of entries; an entry is a list of factor indices
/// whose product it is.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueInput {
    #[serde(default)]
    schema: Option<String>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    factors: Option<Vec<String>>,
    #[serde(default)]
    table: Option<FactorTable>,
    #[serde(default)]
    degree: Option<usize>,
    symbols: Vec<Vec<Vec<usize>>>,
}

#[derive(Serialize)]
struct ResidueOutput {
    schema: &'static str,
    divisor: usize,
    divisor_form: String,
    /// Variable solved for on the divisor; the others keep their order and
    /// are renumbered from 0.
    eliminated_variable: usize,
    source_table: FactorTable,
    table: FactorTable,
    residue: CohClass,
    /// Each symbol of the residue with its entries written out.
    readable: Vec<Vec<String>>,
    is_zero: bool,
}

fn class_text(table: &FactorTable, class: &SquareClass) -> String {
    let parts: Vec<String> = class.ids().map(|id| format!("({})", table.form(id))).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn residue_error(e: CohError) -> CliError {
    CliError::CannotCertify(e.to_string())
}

pub fn residue(path: &Path, divisor: usize, out: Option<&Path>) -> Result<(), CliError> {
    let started = Instant::now();
    let input: ResidueInput = serde_json::from_str(&read(path)?).map_err(|e| CliError::Malformed(e.to_string()))?;
    if input.schema.as_deref().is_some_and(|s| s != RESIDUE_SCHEMA) {
        return Err(CliError::Malformed(format!("expected schema {RESIDUE_SCHEMA}")));
    }
    let (table, entry_of): (FactorTable, Vec<FactoredForm>) = match (input.table, input.factors, input.n) {
        (Some(table), None, _) => {
            let ids = (0..table.len()).map(|i| FactoredForm::single(FactorId(i))).collect();
            (table, ids)
        }
        (None, Some(texts), Some(n)) => {
            let mut table = FactorTable::new(n);
            let forms = texts
                .iter()
                .map(|t| {
                    let f = HomogeneousForm::parse(t, n, None).map_err(|e| CliError::Malformed(format!("{t:?}: {e}")))?;
                    table.register(&f, None).map_err(|e| CliError::Malformed(format!("{t:?}: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (table, forms)
        }
        _ => return Err(CliError::Malformed("give either `table`, or `n` with `factors`".into())),
    };
    let lookup = |i: usize| entry_of.get(i).ok_or_else(|| CliError::Malformed(format!("factor index {i} out of range")));
    let divisor_ff = lookup(divisor)?;
    let divisor_id = match (divisor_ff.factors.len(), divisor_ff.factors.iter().next()) {
        (1, Some((id, 1))) if table.form(*id).degree() == 1 => *id,
        _ => return Err(CliError::Usage(format!("factor {divisor} is not a single linear form"))),
    };
    let degree = input
        .degree
        .or_else(|| input.symbols.first().map(Vec::len))
        .ok_or_else(|| CliError::Malformed("an empty class needs `degree`".into()))?;
    let mut symbols = Vec::new();
    for symbol in &input.symbols {
        let mut entries = Vec::new();
        for entry in symbol {
            let mut ff = FactoredForm::constant(quadric_cto::rational::int(1));
            for &i in entry {
                ff = ff.mul(lookup(i)?);
            }
            entries.push(table.class_of(&ff));
        }
        symbols.push(entries);
    }
    let class = CohClass::from_symbols(degree, symbols).map_err(|e| CliError::Malformed(e.to_string()))?;
    let n = table.ambient_dim();
    if n == 0 {
        return Err(CliError::Usage("residues need n >= 1".into()));
    }
    let mut target = FactorTable::new(n - 1);
    let res = cohomology::residue(&class, divisor_id, &table, &mut target).map_err(residue_error)?;
    let coeffs = table.form(divisor_id).linear_coefficients().map_err(|e| CliError::Internal(e.to_string()))?;
    let eliminated = coeffs.iter().rposition(|c| c != &quadric_cto::rational::int(0)).unwrap_or(0);
    let readable = res.symbols().map(|s| s.entries().iter().map(|c| class_text(&target, c)).collect()).collect();
    let artifact = ResidueOutput {
        schema: RESIDUE_SCHEMA,
        divisor,
        divisor_form: table.form(divisor_id).to_string(),
        eliminated_variable: eliminated,
        is_zero: res.is_zero(),
        source_table: table,
        table: target,
        residue: res,
        readable,
    };
    let mut manifest = RunManifest::new("residue", RESIDUE_SCHEMA).flag("class", path.display()).flag("divisor", divisor);
    manifest.n = Some(n as u64);
    manifest.outcome = if artifact.is_zero { "zero".into() } else { "nonzero".into() };
    let summary = format!(
        "residue along {} = 0: degree {} class, {}",
        artifact.divisor_form,
        artifact.residue.degree(),
        if artifact.is_zero { "zero".to_string() } else { format!("{:?}", artifact.readable) }
    );
    emit(&artifact, manifest, out, started, &summary)?;
    Ok(())
}
