//! Seeded fuzzing of the deciders against each other.
//!
//! Modules are cokernels of random matrices over a catalog of rings. Each
//! module runs the single-module invariant suite; consecutive modules over the
//! same ring are also checked pairwise. Failures come with a minimized script
//! that reproduces them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sgmod::functor::{double_dual_map, dual};
use sgmod::gorenstein::{build_sg_witness_for_projective, classify, duality_check, is_sg_flat, is_sg_projective, Classification};
use sgmod::homological::tor;
use sgmod::ring::Element;
use sgmod::verify::verify_witness;
use sgmod::{Caps, Certificate, FiniteModule, FiniteRing, RingMatrix, Status, Witness};

use crate::dsl::{parse_script, Decl};
use crate::env::Env;
use crate::error::CliError;

pub const CATALOG: [&str; 5] = ["Z/4", "Z/8", "GF(2)[x]/(x^2)", "GF(2)[x]/(x^4)", "GF(2)[x,y]/(x^2, x*y, y^2)"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_gens: usize,
    pub max_rels: usize,
    /// Ring expressions in the script syntax.
    pub catalog: Vec<String>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self { seed: 0, count: 100, max_gens: 2, max_rels: 2, catalog: CATALOG.iter().map(|s| s.to_string()).collect() }
    }
}

pub fn build_ring(text: &str) -> Result<Arc<FiniteRing>, CliError> {
    let script = parse_script(&format!("ring R = {text};"))?;
    let mut env = Env::default();
    match &script.decls[..] {
        [Decl::Ring { name, expr }] => {
            env.define_ring(name, expr)?;
            Ok(env.ring(name)?.clone())
        }
        _ => Err(CliError::Input(format!("`{text}` is not a ring expression"))),
    }
}

#[derive(Clone, Debug)]
pub struct Sample {
    pub index: usize,
    pub ring: usize,
    pub cols: usize,
    /// Relation rows; the module is the cokernel.
    pub rows: Vec<Vec<Element>>,
    pub module: Arc<FiniteModule>,
}

fn cokernel(r: &Arc<FiniteRing>, cols: usize, rows: &[Vec<Element>]) -> Arc<FiniteModule> {
    let entries = rows.iter().flatten().cloned().collect();
    let mat = RingMatrix::new(rows.len(), cols, entries).expect("rectangular");
    FiniteModule::cokernel_of_matrix(r, &mat).expect("cokernel of a valid matrix")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// Not applicable, or a verdict was unknown.
    Skip,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub invariant: &'static str,
    pub outcome: Outcome,
}

fn check(invariant: &'static str, outcome: Outcome) -> Check {
    Check { invariant, outcome }
}

fn holds(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Outcome::Pass
    } else {
        Outcome::Fail(msg())
    }
}

/// Runs `f`; a cap error skips the check and any other error fails it.
fn guarded(f: impl FnOnce() -> sgmod::Result<Outcome>) -> Outcome {
    match f() {
        Ok(o) => o,
        Err(e) if e.is_cap() => Outcome::Skip,
        Err(e) => Outcome::Fail(e.to_string()),
    }
}

#[derive(Clone, Debug)]
pub struct SampleResult {
    pub classification: Option<Classification>,
    pub checks: Vec<Check>,
}

fn known_pair(a: &Certificate, b: &Certificate) -> bool {
    !a.is_unknown() && !b.is_unknown()
}

pub fn single_checks(m: &Arc<FiniteModule>, qf: bool, caps: &Caps) -> SampleResult {
    let mut checks = Vec::new();
    let classification = match classify(m, caps) {
        Ok(c) => {
            checks.push(check("consistency", Outcome::Pass));
            Some(c)
        }
        Err(e) if e.is_cap() => {
            checks.push(check("consistency", Outcome::Skip));
            None
        }
        Err(e) => {
            checks.push(check("consistency", Outcome::Fail(e.to_string())));
            None
        }
    };
    if let Some(c) = &classification {
        let mut rejected = Vec::new();
        for (name, cert) in c.entries() {
            if let Some(w) = &cert.witness {
                if let Err(e) = verify_witness(w, caps) {
                    rejected.push(format!("{name}: {e}"));
                }
            }
        }
        checks.push(check("witnesses", holds(rejected.is_empty(), || rejected.join("; "))));
        let (p, f) = (&c.sg_projective, &c.sg_flat);
        checks.push(check(
            "sg_agreement",
            if known_pair(p, f) {
                holds(p.status == f.status, || format!("sg_projective {:?} but sg_flat {:?}", p.status, f.status))
            } else {
                Outcome::Skip
            },
        ));
        let (p, i) = (&c.projective, &c.injective);
        checks.push(check(
            "qf_equivalence",
            if qf && known_pair(p, i) {
                holds(p.status == i.status, || format!("projective {:?} but injective {:?}", p.status, i.status))
            } else {
                Outcome::Skip
            },
        ));
        checks.push(check(
            "shift_witness",
            if c.projective.is_yes() {
                guarded(|| {
                    let w = build_sg_witness_for_projective(m, caps)?;
                    Ok(match verify_witness(&Witness::SelfExtension(w), caps) {
                        Ok(()) => Outcome::Pass,
                        Err(e) => Outcome::Fail(e.to_string()),
                    })
                })
            } else {
                Outcome::Skip
            },
        ));
    }
    checks.push(check(
        "duality",
        guarded(|| {
            let d = duality_check(m, caps)?;
            Ok(holds(d.orders_match && d.covanish, || {
                format!("|Tor_1(M, R*)| = {} but |Ext^1(M, R)| = {}", d.tor_order, d.ext_order)
            }))
        }),
    ));
    checks.push(check(
        "dual_involution",
        guarded(|| {
            let d1 = dual(m)?;
            let d2 = dual(&d1.module)?;
            let iso = double_dual_map(&d1, &d2)?.is_isomorphism()?;
            Ok(holds(iso, || "evaluation M → M** is not bijective".into()))
        }),
    ));
    SampleResult { classification, checks }
}

fn sg_yes(c: &Option<Classification>, flat: bool) -> bool {
    c.as_ref().is_some_and(|c| if flat { c.sg_flat.is_yes() } else { c.sg_projective.is_yes() })
}

pub fn pair_checks(a: &Arc<FiniteModule>, b: &Arc<FiniteModule>, ca: &Option<Classification>, cb: &Option<Classification>, caps: &Caps) -> Vec<Check> {
    let mut checks = vec![check(
        "tor_symmetry",
        guarded(|| {
            let (ab, ba) = (tor(a, b, 1, caps)?.order(), tor(b, a, 1, caps)?.order());
            Ok(holds(ab == ba, || format!("|Tor_1(M, N)| = {ab} but |Tor_1(N, M)| = {ba}")))
        }),
    )];
    for (flat, name) in [(false, "sum_closure_sg_projective"), (true, "sum_closure_sg_flat")] {
        let outcome = if sg_yes(ca, flat) && sg_yes(cb, flat) {
            guarded(|| {
                let s = a.direct_sum(b)?.sum;
                let c = if flat { is_sg_flat(&s, caps)? } else { is_sg_projective(&s, caps)? };
                Ok(match c.status {
                    Status::Yes => Outcome::Pass,
                    Status::No => Outcome::Fail("direct sum of two Yes modules is No".into()),
                    Status::Unknown => Outcome::Skip,
                })
            })
        } else {
            Outcome::Skip
        };
        checks.push(check(name, outcome));
    }
    checks
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub invariant: &'static str,
    pub samples: Vec<usize>,
    pub ring: String,
    pub detail: String,
    pub repro: String,
}

pub struct FuzzOutcome {
    pub config: FuzzConfig,
    pub rings: Vec<Arc<FiniteRing>>,
    pub quasi_frobenius: Vec<bool>,
    pub samples: Vec<Sample>,
    pub results: Vec<SampleResult>,
    /// `(i, j, checks)` for consecutive samples over the same ring.
    pub pairs: Vec<(usize, usize, Vec<Check>)>,
    pub failures: Vec<Failure>,
}

/// Uniform entries mostly give free cokernels, so three in four entries
/// are drawn from the nilradical instead.
fn random_entry(r: &FiniteRing, radical: &[Vec<u64>], rng: &mut ChaCha8Rng) -> Element {
    let m = r.characteristic();
    if radical.is_empty() || rng.gen_range(0..4) == 0 {
        return (0..r.rank()).map(|_| rng.gen_range(0..m)).collect();
    }
    let mut x = r.zero();
    for g in radical {
        let c = rng.gen_range(0..m);
        x = r.add(&x, &g.iter().map(|&v| v * c % m).collect::<Vec<_>>());
    }
    x
}

pub fn generate(config: &FuzzConfig, rings: &[Arc<FiniteRing>], caps: &Caps) -> Result<Vec<Sample>, CliError> {
    let radicals = rings
        .iter()
        .map(|r| {
            r.local_structure(caps)
                .map(|ls| ls.radical.basis().to_rows())
                .map_err(|e| CliError::Input(format!("{}: {e}", r.describe())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok((0..config.count)
        .map(|index| {
            let ring = index % rings.len();
            let r = &rings[ring];
            let cols = rng.gen_range(1..=config.max_gens.max(1));
            let nrows = rng.gen_range(0..=config.max_rels);
            let rows: Vec<Vec<Element>> = (0..nrows)
                .map(|_| (0..cols).map(|_| random_entry(r, &radicals[ring], &mut rng)).collect())
                .collect();
            let module = cokernel(r, cols, &rows);
            Sample { index, ring, cols, rows, module }
        })
        .collect())
}

fn module_decl(name: &str, r: &FiniteRing, cols: usize, rows: &[Vec<Element>]) -> String {
    if rows.is_empty() {
        return format!("module {name} over R = free {cols};");
    }
    let rows: Vec<String> = rows
        .iter()
        .map(|row| format!("[{}]", row.iter().map(|e| r.format_element(e)).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("module {name} over R = coker [{}];", rows.join(", "))
}

fn still_fails(r: &Arc<FiniteRing>, qf: bool, cols: usize, rows: &[Vec<Element>], invariant: &str, caps: &Caps) -> bool {
    let m = cokernel(r, cols, rows);
    single_checks(&m, qf, caps)
        .checks
        .iter()
        .any(|c| c.invariant == invariant && matches!(c.outcome, Outcome::Fail(_)))
}

/// Drops relation rows and generator columns while the failure persists.
fn minimize(r: &Arc<FiniteRing>, qf: bool, sample: &Sample, invariant: &str, caps: &Caps) -> (usize, Vec<Vec<Element>>) {
    let (mut cols, mut rows) = (sample.cols, sample.rows.clone());
    loop {
        let mut shrunk = false;
        for i in (0..rows.len()).rev() {
            let mut trial = rows.clone();
            trial.remove(i);
            if still_fails(r, qf, cols, &trial, invariant, caps) {
                rows = trial;
                shrunk = true;
            }
        }
        for j in (0..cols).rev() {
            if cols == 1 {
                break;
            }
            let trial: Vec<Vec<Element>> = rows
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
                .collect();
            if still_fails(r, qf, cols - 1, &trial, invariant, caps) {
                rows = trial;
                cols -= 1;
                shrunk = true;
            }
        }
        if !shrunk {
            return (cols, rows);
        }
    }
}

fn commands_for(invariant: &str) -> &'static str {
    match invariant {
        "duality" => "module D over R = dual R;\ntor M D 1;\next M R 1;",
        "tor_symmetry" => "tor M N 1;\ntor N M 1;",
        "sum_closure_sg_projective" => "module S over R = M (+) N;\nwitness S sg_projective;",
        "sum_closure_sg_flat" => "module S over R = M (+) N;\nwitness S sg_flat;",
        _ => "classify M;",
    }
}

pub fn run(config: &FuzzConfig, caps: &Caps) -> Result<FuzzOutcome, CliError> {
    if config.catalog.is_empty() {
        return Err(CliError::Input("fuzz catalog is empty".into()));
    }
    let rings = config.catalog.iter().map(|t| build_ring(t)).collect::<Result<Vec<_>, _>>()?;
    let quasi_frobenius = rings
        .iter()
        .map(|r| r.is_quasi_frobenius(caps).map_err(|e| CliError::Input(format!("{}: {e}", r.describe()))))
        .collect::<Result<Vec<_>, _>>()?;
    let samples = generate(config, &rings, caps)?;
    let results: Vec<SampleResult> = samples
        .par_iter()
        .map(|s| single_checks(&s.module, quasi_frobenius[s.ring], caps))
        .collect();
    let step = rings.len();
    let pairs: Vec<(usize, usize, Vec<Check>)> = (0..samples.len().saturating_sub(step))
        .into_par_iter()
        .map(|i| {
            let j = i + step;
            let checks = pair_checks(
                &samples[i].module,
                &samples[j].module,
                &results[i].classification,
                &results[j].classification,
                caps,
            );
            (i, j, checks)
        })
        .collect();

    let mut failures = Vec::new();
    for (s, res) in samples.iter().zip(&results) {
        for c in &res.checks {
            if let Outcome::Fail(detail) = &c.outcome {
                let r = &rings[s.ring];
                let (cols, rows) = minimize(r, quasi_frobenius[s.ring], s, c.invariant, caps);
                let repro = format!(
                    "# fuzz seed {} sample {}: {}\nring R = {};\n{}\n{}\n",
                    config.seed,
                    s.index,
                    c.invariant,
                    config.catalog[s.ring],
                    module_decl("M", r, cols, &rows),
                    commands_for(c.invariant)
                );
                failures.push(Failure { invariant: c.invariant, samples: vec![s.index], ring: r.describe(), detail: detail.clone(), repro });
            }
        }
    }
    for (i, j, checks) in &pairs {
        for c in checks {
            if let Outcome::Fail(detail) = &c.outcome {
                let (a, b) = (&samples[*i], &samples[*j]);
                let r = &rings[a.ring];
                let repro = format!(
                    "# fuzz seed {} samples {i} and {j}: {}\nring R = {};\n{}\n{}\n{}\n",
                    config.seed,
                    c.invariant,
                    config.catalog[a.ring],
                    module_decl("M", r, a.cols, &a.rows),
                    module_decl("N", r, b.cols, &b.rows),
                    commands_for(c.invariant)
                );
                failures.push(Failure { invariant: c.invariant, samples: vec![*i, *j], ring: r.describe(), detail: detail.clone(), repro });
            }
        }
    }
    Ok(FuzzOutcome { config: config.clone(), rings, quasi_frobenius, samples, results, pairs, failures })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl FuzzOutcome {
    fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.results.iter().flat_map(|r| &r.checks).chain(self.pairs.iter().flat_map(|(_, _, c)| c))
    }

    pub fn tally(&self) -> BTreeMap<&'static str, Tally> {
        let mut out: BTreeMap<&'static str, Tally> = BTreeMap::new();
        for c in self.all_checks() {
            let t = out.entry(c.invariant).or_default();
            match c.outcome {
                Outcome::Pass => t.passed += 1,
                Outcome::Fail(_) => t.failed += 1,
                Outcome::Skip => t.skipped += 1,
            }
        }
        out
    }

    /// Samples whose SG-projective or SG-flat verdict is missing or unknown.
    pub fn unknown_count(&self) -> usize {
        self.results
            .iter()
            .filter(|r| r.classification.as_ref().is_none_or(|c| c.sg_projective.is_unknown() || c.sg_flat.is_unknown()))
            .count()
    }

    pub fn census(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for r in &self.results {
            let class = match &r.classification {
                None => "unclassified",
                Some(c) if c.projective.is_yes() => "projective",
                Some(c) if c.sg_projective.is_yes() => "sg_projective_not_projective",
                Some(c) if c.g_projective_certified.is_yes() && c.sg_projective.is_no() => "g_projective_not_sg_projective",
                Some(c) if c.g_projective_certified.is_yes() => "g_projective_sg_unknown",
                Some(_) => "not_certified",
            };
            *out.entry(class).or_insert(0) += 1;
        }
        out
    }

    pub fn to_body(&self) -> Map<String, Value> {
        let mut verdicts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
        for c in self.results.iter().filter_map(|r| r.classification.as_ref()) {
            for (name, cert) in c.entries() {
                let s = match cert.status {
                    Status::Yes => "yes",
                    Status::No => "no",
                    Status::Unknown => "unknown",
                };
                *verdicts.entry(name).or_default().entry(s).or_insert(0) += 1;
            }
        }
        let invariants: Map<String, Value> = self
            .tally()
            .into_iter()
            .map(|(k, t)| (k.to_string(), json!({"passed": t.passed, "failed": t.failed, "skipped": t.skipped})))
            .collect();
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| json!({"invariant": f.invariant, "samples": f.samples, "ring": f.ring, "detail": f.detail, "repro": f.repro}))
            .collect();
        let count = self.samples.len();
        let unknown = self.unknown_count();
        match json!({
            "seed": self.config.seed,
            "count": count,
            "rings": self.rings.iter().map(|r| r.describe()).collect::<Vec<_>>(),
            "census": self.census(),
            "verdict_counts": verdicts,
            "invariants": invariants,
            "unknown": unknown,
            "unknown_rate": if count == 0 { 0.0 } else { unknown as f64 / count as f64 },
            "failures": failures,
        }) {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rings_build() {
        let caps = Caps::default();
        let qf: Vec<bool> = CATALOG.iter().map(|t| build_ring(t).unwrap().is_quasi_frobenius(&caps).unwrap()).collect();
        assert_eq!(qf, vec![true, true, true, true, false]);
    }

    #[test]
    fn generation_is_deterministic() {
        let config = FuzzConfig { count: 12, ..FuzzConfig::default() };
        let rings: Vec<_> = CATALOG.iter().map(|t| build_ring(t).unwrap()).collect();
        let a = generate(&config, &rings, &Caps::default()).unwrap();
        let b = generate(&config, &rings, &Caps::default()).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.rows == y.rows && x.cols == y.cols));
    }

    #[test]
    fn repro_declarations_parse() {
        let r = build_ring("GF(2)[x,y]/(x^2, x*y, y^2)").unwrap();
        let x = r.named("x").unwrap().clone();
        let one = r.one();
        let decl = module_decl("M", &r, 2, &[vec![x, r.add(&one, r.named("y").unwrap())]]);
        let src = format!("ring R = GF(2)[x,y]/(x^2, x*y, y^2);\n{decl}\n{}", commands_for("tor_symmetry").replace('N', "M"));
        parse_script(&src).unwrap();
        assert!(parse_script(&format!("ring R = Z/4;\n{}", module_decl("M", &r, 3, &[]))).is_ok());
    }
}
