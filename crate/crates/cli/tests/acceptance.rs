//! The acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test -p sgmod-cli --test acceptance -- --nocapture`.

#[path = "../../core/tests/support/groebner_oracle.rs"]
mod groebner_oracle;
#[path = "../../core/tests/support/linalg_oracle.rs"]
mod linalg_oracle;
#[path = "../../core/tests/support/rings.rs"]
mod rings;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rings::*;
use sgmod::certificate::Disproof;
use sgmod::gorenstein::{certify_g_projective, classify, is_sg_projective, summand_witness_from_periodic};
use sgmod::properties::{is_injective, is_isomorphic, is_projective};
use sgmod::verify::verify_witness;
use sgmod::{Caps, FiniteModule, FiniteRing, ModuleMap, Status, Witness};
use sgmod_cli::fuzz::{self, FuzzConfig, FuzzOutcome};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within(t: Duration, limit: Duration) -> Outcome {
    ensure!(t < limit, "took {t:.2?}, limit {limit:?}");
    Ok(())
}

fn dual_numbers_example(caps: &Caps) -> Outcome {
    let start = Instant::now();
    let r = truncated(2);
    let m = principal(&r, var(&r, "x"));
    let c = classify(&m, caps).map_err(|e| e.to_string())?;
    use Status::*;
    let expected = [
        ("projective", No),
        ("injective", No),
        ("flat", No),
        ("free", No),
        ("sg_projective", Yes),
        ("sg_injective", Yes),
        ("sg_flat", Yes),
        ("g_projective_certified", Yes),
    ];
    for ((name, cert), (want_name, want)) in c.entries().iter().zip(expected) {
        ensure!(*name == want_name && cert.status == want, "{name}: {:?}, expected {want:?}", cert.status);
        if let Some(w) = &cert.witness {
            verify_witness(w, caps).map_err(|e| format!("{name} witness rejected: {e}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))
}

/// Elements killed by every nilpotent element.
fn brute_socle_size(r: &FiniteRing, caps: &Caps) -> usize {
    let elems: Vec<Vec<u64>> = r.elements(caps).unwrap().collect();
    let nil: Vec<&Vec<u64>> = elems.iter().filter(|a| r.is_nilpotent(a)).collect();
    elems.iter().filter(|s| nil.iter().all(|n| r.is_zero_element(&r.mul(s, n)))).count()
}

/// Every local factor has a socle of the size of its residue field.
fn brute_quasi_frobenius(r: &Arc<FiniteRing>, caps: &Caps) -> bool {
    let d = r.decompose_local(caps).unwrap();
    d.factors.iter().all(|f| {
        let elems: Vec<Vec<u64>> = f.ring.elements(caps).unwrap().collect();
        let radical = elems.iter().filter(|a| f.ring.is_nilpotent(a)).count();
        brute_socle_size(&f.ring, caps) * radical == elems.len()
    })
}

fn quasi_frobenius_table(caps: &Caps) -> Outcome {
    let table = [
        (zmod(4), true),
        (zmod(6), true),
        (truncated(4), true),
        (two_squares(), true),
        (square_zero(), false),
    ];
    for (r, qf) in table {
        let start = Instant::now();
        let got = r.is_quasi_frobenius(caps).map_err(|e| e.to_string())?;
        within(start.elapsed(), Duration::from_secs(1))?;
        ensure!(got == qf, "{}: detected {got}, expected {qf}", r.describe());
        ensure!(brute_quasi_frobenius(&r, caps) == qf, "{}: socle oracle disagrees", r.describe());
    }
    Ok(())
}

fn strict_chain(caps: &Caps) -> Outcome {
    let start = Instant::now();
    let r = truncated(4);
    let m = principal(&r, var(&r, "x"));
    let err = |e: sgmod::Error| e.to_string();

    let (cert, complete) = certify_g_projective(&m, caps).map_err(err)?;
    ensure!(cert.is_yes(), "G-projectivity not certified: {:?}", cert.status);
    let complete = complete.ok_or("no complete resolution")?;
    ensure!(complete.complex.period() == 2, "period {}", complete.complex.period());

    let s = summand_witness_from_periodic(&complete, caps).map_err(err)?;
    let expected = m.direct_sum(&principal(&r, power(&r, "x", 3))).map_err(err)?.sum;
    ensure!(is_isomorphic(&s.summand_of, &expected, caps).map_err(err)?.is_yes(), "N is not (x) ⊕ (x³)");
    ensure!(is_sg_projective(&s.summand_of, caps).map_err(err)?.is_yes(), "N is not SG-projective");
    let round = s.injection.then(&s.retraction).map_err(err)?;
    ensure!(round.equals(&ModuleMap::identity(&m)).map_err(err)?, "retraction ∘ injection ≠ id");
    verify_witness(&Witness::Summand(s.to_witness(caps).map_err(err)?), caps).map_err(err)?;

    let sg = is_sg_projective(&m, caps).map_err(err)?;
    ensure!(sg.is_no(), "(x) SG-projective: {:?}", sg.status);
    ensure!(matches!(sg.disproof, Some(Disproof::ExhaustedClasses { .. })), "disproof {:?}", sg.disproof);
    ensure!(is_projective(&m, caps).map_err(err)?.is_no(), "(x) is projective");
    within(start.elapsed(), Duration::from_secs(5))
}

fn no_failures(corpus: &FuzzOutcome, invariant: &str) -> Outcome {
    let t = corpus.tally().get(invariant).copied().unwrap_or_default();
    ensure!(t.failed == 0, "{invariant}: {} failures", t.failed);
    if let Some(f) = corpus.failures.iter().find(|f| f.invariant == invariant) {
        return Err(format!("{invariant}: {}\n{}", f.detail, f.repro));
    }
    Ok(())
}

fn sg_agreement(corpus: &FuzzOutcome, elapsed: Duration) -> Outcome {
    ensure!(corpus.samples.len() >= 100, "{} samples", corpus.samples.len());
    ensure!(corpus.rings.len() >= 5, "{} rings", corpus.rings.len());
    no_failures(corpus, "sg_agreement")?;
    let unknown = corpus.unknown_count() as f64 / corpus.samples.len() as f64;
    ensure!(unknown < 0.05, "unknown rate {:.1}%", unknown * 100.0);
    within(elapsed, Duration::from_secs(120))
}

fn duality(corpus: &FuzzOutcome) -> Outcome {
    no_failures(corpus, "duality")?;
    let t = corpus.tally()["duality"];
    ensure!(t.passed == corpus.samples.len(), "{} of {} modules checked", t.passed, corpus.samples.len());
    Ok(())
}

fn qf_equivalence(corpus: &FuzzOutcome, caps: &Caps) -> Outcome {
    no_failures(corpus, "qf_equivalence")?;
    for (i, r) in corpus.rings.iter().enumerate() {
        let qf = corpus.quasi_frobenius[i];
        let checked = corpus
            .samples
            .iter()
            .zip(&corpus.results)
            .filter(|(s, _)| s.ring == i)
            .flat_map(|(_, res)| &res.checks)
            .filter(|c| c.invariant == "qf_equivalence" && matches!(c.outcome, fuzz::Outcome::Pass))
            .count();
        ensure!(!qf || checked > 0, "no modules checked over {}", r.describe());
    }
    let err = |e: sgmod::Error| e.to_string();
    let reg = FiniteModule::regular(&square_zero());
    ensure!(is_projective(&reg, caps).map_err(err)?.is_yes(), "regular module not projective");
    ensure!(is_injective(&reg, caps).map_err(err)?.is_no(), "regular module injective");
    Ok(())
}

fn closure(corpus: &FuzzOutcome) -> Outcome {
    for name in ["sum_closure_sg_projective", "sum_closure_sg_flat"] {
        no_failures(corpus, name)?;
        ensure!(corpus.tally()[name].passed > 0, "{name}: no pairs checked");
    }
    no_failures(corpus, "shift_witness")?;
    let mut projective = 0;
    for (i, res) in corpus.results.iter().enumerate() {
        let Some(c) = &res.classification else { continue };
        if c.projective.is_yes() {
            projective += 1;
            ensure!(c.sg_projective.is_yes(), "projective sample {i} not SG-projective");
            let shift = res.checks.iter().find(|c| c.invariant == "shift_witness");
            ensure!(
                shift.is_some_and(|c| matches!(c.outcome, fuzz::Outcome::Pass)),
                "shift witness for sample {i}: {:?}",
                shift.map(|c| &c.outcome)
            );
        }
    }
    ensure!(projective > 0, "no projective modules in the corpus");
    Ok(())
}

fn substrate(corpus: &FuzzOutcome) -> Outcome {
    let start = Instant::now();
    let count = linalg_oracle::check_all(|_, _, _| true);
    ensure!(count == 12_450_854, "{count} matrices checked");
    for (p, vars, gens, dim) in groebner_oracle::fixtures() {
        let r = quotient(p, &vars, &gens);
        ensure!(r.rank() == dim, "F_{p}{vars:?}: dimension {} but expected {dim}", r.rank());
        let brute = groebner_oracle::quotient_dimension(p, vars.len(), &gens, 10);
        ensure!(brute == dim, "F_{p}{vars:?}: Macaulay dimension {brute} but expected {dim}");
    }
    for name in ["tor_symmetry", "dual_involution"] {
        no_failures(corpus, name)?;
        ensure!(corpus.tally()[name].passed > 0, "{name}: nothing checked");
    }
    within(start.elapsed(), Duration::from_secs(60))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panicked: {}", msg.unwrap_or_default()))
    })
}

#[test]
fn acceptance() {
    let caps = Caps::default();
    let mut lines = Vec::new();
    let mut record = |n: usize, what: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = guarded(f);
        let t = start.elapsed();
        let mark = if outcome.is_ok() { "PASS" } else { "FAIL" };
        println!("[{mark}] {n} {what} ({t:.2?})");
        if let Err(e) = &outcome {
            println!("       {e}");
        }
        lines.push((n, outcome.is_ok()));
    };

    record(1, "dual numbers: exact classification with verified witnesses", &mut || dual_numbers_example(&caps));
    record(2, "quasi-Frobenius detection agrees with the socle oracle", &mut || quasi_frobenius_table(&caps));
    record(3, "strict chain over F2[x]/(x^4)", &mut || strict_chain(&caps));

    let mut corpus: Option<FuzzOutcome> = None;
    record(4, "SG-projective and SG-flat verdicts agree on the fuzz corpus", &mut || {
        let start = Instant::now();
        let c = fuzz::run(&FuzzConfig::default(), &caps).map_err(|e| e.to_string())?;
        let outcome = sg_agreement(&c, start.elapsed());
        corpus = Some(c);
        outcome
    });
    let missing = || Err::<(), _>("fuzz corpus could not be built".to_string());
    let with = |f: &dyn Fn(&FuzzOutcome) -> Outcome| corpus.as_ref().map_or_else(missing, f);

    record(5, "|Tor_1(M, R*)| = |Ext^1(M, R)| on every corpus module", &mut || with(&duality));
    record(6, "projective = injective over quasi-Frobenius rings", &mut || with(&|c| qf_equivalence(c, &caps)));
    record(7, "direct sums and projectives stay strongly Gorenstein", &mut || with(&closure));
    record(8, "linear algebra, Groebner and corpus-wide oracles", &mut || with(&substrate));

    let failed: Vec<usize> = lines.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
