//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! wall-clock budget. Run with `cargo test --test acceptance -- --nocapture`
//! to see the report.

use std::time::{Duration, Instant};

use quadric_cto::bundles::{
    classify, double_cover_branch, family_degrees, family_type_degrees, fibre_dimension_level, from_double_cover,
    from_singular_hypersurface, matrix_from_branch, matrix_from_hypersurface, padded_diagonal, reconstruct_hypersurface,
};
use quadric_cto::cohomology::{residue, univariate_residue_harness, CohClass};
use quadric_cto::cto::{build_ledger, verify_cto, ArrangementConfig, CtoVerdict, Family, IndexMap, DEFAULT_MAX_RESAMPLE};
use quadric_cto::forms::HomogeneousForm;
use quadric_cto::rng::SplitMix64;
use quadric_cto::square_classes::{FactorTable, SquareClass};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn run(&mut self, id: u32, title: &str, budget: Duration, body: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = body();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:?}"))
        });
        match result {
            Ok(()) => println!("PASS {id}. {title} ({elapsed:.2?})"),
            Err(why) => {
                println!("FAIL {id}. {title} ({elapsed:.2?}): {why}");
                self.failures.push(format!("{id}: {why}"));
            }
        }
    }
}

fn ledger(n: usize, seed: u64) -> Result<quadric_cto::cto::CoefficientLedger, String> {
    let cfg = ArrangementConfig::generate(n, seed, DEFAULT_MAX_RESAMPLE).map_err(|e| e.to_string())?;
    build_ledger(&cfg, &IndexMap::natural(n)).map_err(|e| e.to_string())
}

fn degree_tables() -> Outcome {
    let l = ledger(2, 1)?;
    let want: [(Family, [u32; 4]); 4] = [
        (Family::C, [0, 2, 8, 10]),
        (Family::CPrime, [1, 1, 9, 9]),
        (Family::CTilde, [5, 5, 5, 5]),
        (Family::CTildePrime, [4, 6, 4, 6]),
    ];
    for (family, expected) in want {
        ensure(l.degrees(family) == expected, || format!("{}: {:?} != {expected:?}", family.name(), l.degrees(family)))?;
    }
    Ok(())
}

fn degree_suite() -> Outcome {
    for n in 2..=5usize {
        let l = ledger(n, 3)?;
        let (m, mp, mt, mtp) =
            (l.degrees(Family::C), l.degrees(Family::CPrime), l.degrees(Family::CTilde), l.degrees(Family::CTildePrime));
        ensure((m[0], m[1], mp[0], mp[1]) == (0, 2, 1, 1), || format!("n = {n}: leading degrees"))?;
        let big = (1u32 << n) + n as u32 - 1;
        ensure(mt.iter().all(|&x| x == big), || format!("n = {n}: tilde degrees {mt:?}"))?;
        ensure(mtp.iter().zip(mt).all(|(a, b)| *a <= b + 1), || format!("n = {n}: tilde-prime bound"))?;
        for r in (1usize << (n - 1)) - 1..=(1usize << n) - 2 {
            let bound = 2 * (r + 2) * (n + r);
            let sum = |v: &[u32]| v[..r + 2].iter().map(|&x| x as usize).sum::<usize>();
            if r == (1 << n) - 2 {
                ensure(sum(m) == (r + 2) * (n + r + 1), || format!("n = {n}, r = {r}: sum m = {}", sum(m)))?;
            }
            ensure(sum(m) <= bound && sum(mp) <= bound, || format!("n = {n}, r = {r}: sums exceed {bound}"))?;
        }
    }
    Ok(())
}

fn certify(n: usize, seed: u64) -> Outcome {
    let cfg = ArrangementConfig::generate(n, seed, DEFAULT_MAX_RESAMPLE).map_err(|e| e.to_string())?;
    let cert = verify_cto(&cfg).map_err(|e| e.to_string())?;
    ensure(cert.verdict == CtoVerdict::Certified, || {
        format!("n = {n}, seed = {seed}: {:?} failing {:?}", cert.verdict, cert.failing_checks())
    })
}

fn negative_controls() -> Outcome {
    let cfg = ArrangementConfig::generate(2, 5, DEFAULT_MAX_RESAMPLE).map_err(|e| e.to_string())?;
    let mut lines = cfg.lines.clone();
    lines[2] = lines[0].clone();
    let collided = ArrangementConfig::from_lines(2, 5, lines).map_err(|e| e.to_string())?;
    let cert = verify_cto(&collided).map_err(|e| e.to_string())?;
    ensure(cert.verdict == CtoVerdict::Failed && cert.failing_checks().contains(&"C1"), || {
        format!("l1 = l3: {:?} failing {:?}", cert.verdict, cert.failing_checks())
    })?;
    let mut perturbed = cfg.clone();
    perturbed.g[0][1] = perturbed.g[0][1].add(&HomogeneousForm::variable(2, 0).pow(2)).map_err(|e| e.to_string())?;
    let cert = verify_cto(&perturbed).map_err(|e| e.to_string())?;
    ensure(cert.verdict == CtoVerdict::Failed && cert.failing_checks().contains(&"C4"), || {
        format!("perturbed g11: {:?} failing {:?}", cert.verdict, cert.failing_checks())
    })
}

/// Random symbols on `P^3` whose entries are products of lines from a small
/// pool, so the divisor often occurs with odd and even multiplicity.
struct SymbolSampler {
    rng: SplitMix64,
    pool: Vec<HomogeneousForm>,
}

impl SymbolSampler {
    fn new(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut pool: Vec<HomogeneousForm> = Vec::new();
        while pool.len() < 6 {
            let c: Vec<i64> = (0..4).map(|_| rng.range_i64(-3, 3)).collect();
            let f = HomogeneousForm::linear_i64(&c);
            if c[1..].iter().any(|&x| x != 0) && !pool.iter().any(|g| g.is_proportional(&f)) {
                pool.push(f);
            }
        }
        Self { rng, pool }
    }

    fn entry(&mut self) -> Vec<HomogeneousForm> {
        (0..1 + self.rng.below(3)).map(|_| self.pool[self.rng.below(self.pool.len())].clone()).collect()
    }

    fn entries(&mut self, degree: usize) -> Vec<Vec<HomogeneousForm>> {
        (0..degree).map(|_| self.entry()).collect()
    }
}

fn classes(table: &mut FactorTable, entries: &[Vec<HomogeneousForm>]) -> Vec<SquareClass> {
    entries
        .iter()
        .map(|e| {
            let ff = table.register_factors(e).expect("linear factors");
            table.class_of(&ff)
        })
        .collect()
}

fn residue_properties() -> Outcome {
    let mut s = SymbolSampler::new(2024);
    let err = |e: quadric_cto::cohomology::CohError| e.to_string();
    for trial in 0..1000 {
        let degree = 1 + s.rng.below(4);
        let e1 = s.entries(degree);
        let e2 = s.entries(degree);
        let divisor_form = s.pool[s.rng.below(s.pool.len())].clone();
        let mut table = FactorTable::new(3);
        let c1 = classes(&mut table, &e1);
        let c2 = classes(&mut table, &e2);
        let divisor = table.register_linear(&divisor_form).map_err(|e| e.to_string())?;
        let mut target = FactorTable::new(2);
        let a1 = CohClass::symbol(c1.clone());
        let a2 = CohClass::symbol(c2.clone());
        let r1 = residue(&a1, divisor, &table, &mut target).map_err(err)?;
        let r2 = residue(&a2, divisor, &table, &mut target).map_err(err)?;

        // No entry with odd valuation: the residue vanishes.
        if c1.iter().all(|c| !c.contains(divisor)) {
            ensure(r1.is_zero(), || format!("trial {trial}: m = 0 but residue {r1:?}"))?;
        }
        let sum = residue(&a1.add(&a2).map_err(err)?, divisor, &table, &mut target).map_err(err)?;
        ensure(sum == r1.add(&r2).map_err(err)?, || format!("trial {trial}: residue not additive"))?;

        let mut permuted = c1.clone();
        permuted.rotate_left(1);
        permuted.reverse();
        let rp = residue(&CohClass::symbol(permuted), divisor, &table, &mut target).map_err(err)?;
        ensure(rp == r1, || format!("trial {trial}: permutation changed the residue"))?;

        // Multiply one entry by the square of a pool line, possibly the
        // divisor itself, at the level of forms.
        let slot = s.rng.below(degree);
        let square = s.pool[s.rng.below(s.pool.len())].clone();
        let mut padded = e1.clone();
        padded[slot].extend([square.clone(), square]);
        let cp = classes(&mut table, &padded);
        ensure(cp == c1, || format!("trial {trial}: square changed a class"))?;
        let rs = residue(&CohClass::symbol(cp), divisor, &table, &mut target).map_err(err)?;
        ensure(rs == r1, || format!("trial {trial}: square changed the residue"))?;
    }
    Ok(())
}

fn residue_harness() -> Outcome {
    for e in 1..=4 {
        let report = univariate_residue_harness(e, 100, 17);
        ensure(report.passed(), || format!("e = {e}: {:?}", report.failures.first()))?;
        ensure(report.nonzero_residues > 0, || format!("e = {e}: no informative samples"))?;
    }
    Ok(())
}

fn round_trips() -> Outcome {
    for (n, r, d) in [(2usize, 1usize, 2u32), (2, 2, 2), (3, 3, 2)] {
        let model = from_singular_hypersurface(n, r, d, 7).map_err(|e| e.to_string())?;
        let mut want = vec![d; r + 1];
        want.push(d + 2);
        ensure(model.matrix.bundle_type().degrees == want, || format!("({n}, {r}, {d}): hypersurface type"))?;
        let f = reconstruct_hypersurface(&model.matrix).map_err(|e| e.to_string())?;
        ensure(f == model.hypersurface, || format!("({n}, {r}, {d}): reconstruction differs"))?;
        let back = matrix_from_hypersurface(&f, n, r).map_err(|e| e.to_string())?;
        ensure(back == model.matrix, || format!("({n}, {r}, {d}): matrix round trip"))?;

        let a = from_double_cover(n, r, d, 7).map_err(|e| e.to_string())?;
        want[0] = 0;
        ensure(a.bundle_type().degrees == want, || format!("({n}, {r}, {d}): double cover type"))?;
        let branch = double_cover_branch(&a).map_err(|e| e.to_string())?;
        let back = matrix_from_branch(&branch, n, r).map_err(|e| e.to_string())?;
        ensure(back == a, || format!("({n}, {r}, {d}): branch round trip"))?;
    }
    Ok(())
}

fn classification() -> Outcome {
    for r in 1..=1000u64 {
        let k = fibre_dimension_level(r);
        ensure((1u64 << (k - 1)) - 1 <= r && r <= (1u64 << k) - 2, || format!("r = {r}: k = {k}"))?;
    }
    for n in 1..=6u64 {
        let p = 1u64 << n;
        for r in 1..=62u64 {
            let report = classify(n, r, None);
            let got: Vec<u64> = report.flags.iter().map(|f| f.threshold).collect();
            let want = vec![p + n - 1, p + n + 1, p + n - 1, 2 * p + 2 * n - 2, 2 * (n + r) * (r + 2)];
            ensure(got == want, || format!("(n, r) = ({n}, {r}): thresholds {got:?} != {want:?}"))?;
        }
    }
    // The smallest admissible degree at the family bound leaves room for
    // every family entry: arithmetic for n <= 6, padded models for n <= 4.
    for n in 2..=6usize {
        let ledger = if n <= 4 { Some(ledger(n, 5)?) } else { None };
        let line = HomogeneousForm::linear_i64(&(0..=n as i64).map(|i| 2 * i + 1).collect::<Vec<_>>());
        for r in (1usize << (n - 1)) - 1..=(1usize << n) - 2 {
            let bound = 2 * (n + r) * (r + 2);
            let degrees = if r % 2 == 1 { vec![bound, bound + 1] } else { vec![bound] };
            for d in degrees {
                let (family, ty) = family_type_degrees(n, r, d as u64).map_err(|e| format!("({n}, {r}, {d}): {e}"))?;
                let m = family_degrees(n, family);
                ensure(ty[r + 1] >= m[r + 1], || format!("({n}, {r}, {d}): last degree {} < {}", ty[r + 1], m[r + 1]))?;
                if let Some(l) = &ledger {
                    padded_diagonal(l, family, r, &ty, &line).map_err(|e| format!("({n}, {r}, {d}): {e}"))?;
                }
            }
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let run = || -> Result<String, String> {
        let cfg = ArrangementConfig::generate(3, 99, DEFAULT_MAX_RESAMPLE).map_err(|e| e.to_string())?;
        serde_json::to_string(&verify_cto(&cfg).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "certificate JSON differs between runs".into())
}

fn main() {
    let mut report = Report { failures: Vec::new() };
    let secs = Duration::from_secs;
    report.run(1, "degree tables for n = 2", secs(1), degree_tables);
    report.run(2, "degree identities for n = 2..5", secs(10), degree_suite);
    for n in [2, 3, 4] {
        report.run(3, &format!("certification at n = {n}, seeds 1..=5"), secs(5 * 60), || {
            (1..=5).try_for_each(|seed| certify(n, seed))
        });
    }
    report.run(3, "certification at n = 5", secs(600), || certify(5, 1));
    report.run(3, "negative controls name C1 and C4", secs(60), negative_controls);
    report.run(4, "residue properties on 1000 symbols", secs(30), residue_properties);
    report.run(5, "ramified pullback harness, e = 1..4", secs(10), residue_harness);
    report.run(6, "hypersurface and double cover round trips", secs(10), round_trips);
    report.run(7, "classification arithmetic and padding at the bound", secs(10), classification);
    report.run(8, "certificate JSON is deterministic", secs(60), determinism);
    if !report.failures.is_empty() {
        eprintln!("failed criteria: {:#?}", report.failures);
        std::process::exit(1);
    }
}
