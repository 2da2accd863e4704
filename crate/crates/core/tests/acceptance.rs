//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use superspencer::clifford::{Signature, SpinorModule};
use superspencer::deform::{
    admissibility_check, clifford_cocycle, deformation_invariance_checks, h_max, integrate, invariant_cocycles,
    AdmissibleData, FilteredDeformation, GradedSubalgebra,
};
use superspencer::exactla::{q, sparse, Rational, SparseVec, Subspace};
use superspencer::flatmodel::{check_causal, find_squaring_map, restricted_kappa_rank, FlatModel, Parity};
use superspencer::homogmodel::{reconstruct, LieCertificate};
use superspencer::spencer::{normalized_cocycle_basis, Host, NormalizedCocycle, SpencerComplex};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn inputs(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../inputs").join(name)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("superspencer-acceptance-{}-{name}", std::process::id()))
}

/// Runs the command-line tool and parses its JSON report.
fn cli(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_superspencer"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    let code = out.status.code().unwrap_or(-1);
    let report = serde_json::from_slice(&out.stdout).map_err(|e| format!("report is not JSON: {e}"))?;
    Ok((code, report))
}

fn model(p: usize, qq: usize, parity: Parity) -> Arc<FlatModel> {
    Arc::new(FlatModel::minimal(Signature::auto(p, qq).unwrap(), parity).unwrap())
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The 11d degree-2 report, shared by criteria 1 and 2.
fn eleven_dimensional_report() -> Result<&'static (i32, Value), String> {
    static REPORT: OnceLock<Result<(i32, Value), String>> = OnceLock::new();
    REPORT.get_or_init(|| cli(&["cohomology", "--signature", "1,10", "--emit", "dims"])).as_ref().map_err(Clone::clone)
}

fn criterion_1() -> Outcome {
    let (code, r) = eleven_dimensional_report()?;
    let code = *code;
    ensure(code == 0, || format!("exit code {code}, errors {}", r["errors"]))?;
    let layout = &r["result"]["layout"];
    ensure(layout["s"] == 32 && layout["v"] == 11, || format!("layout {layout}"))?;
    let raw = r["result"]["raw"]["dim_h"].as_u64().ok_or("no raw dim")?;
    let normalized = r["result"]["normalized_dim"].as_u64().ok_or("no normalized dim")?;
    let expected = binomial(11, 4);
    ensure(raw == expected && normalized == expected, || format!("raw {raw}, normalized {normalized}, expected {expected}"))?;
    ensure(r["verdicts"]["routes_agree"] == true, || "routes disagree".into())?;
    Ok(format!("dim H^(2,2) = {raw} by Z/B and {normalized} by normalized solve, dim Λ⁴ℝ¹¹ = {expected}"))
}

fn criterion_2() -> Outcome {
    let mut signatures: Vec<(usize, usize)> = (2..=7).flat_map(|n| (0..=n).map(move |p| (p, n - p))).collect();
    signatures.push((1, 10));
    let mut checked = 0;
    for (p, qq) in signatures {
        let sig = Signature::auto(p, qq).map_err(|e| e.to_string())?;
        let module = SpinorModule::minimal(sig).map_err(|e| e.to_string())?;
        for parity in [Parity::Symmetric, Parity::Skew] {
            let Some(kappa) = find_squaring_map(&module, parity) else { continue };
            let m = FlatModel::build(module.clone(), kappa).map_err(|e| e.to_string())?;
            let host = Host::from_flat(&m);
            let big = p + qq > 7;
            for d in 1..=4 {
                let c = SpencerComplex::new(host.clone(), d, if big { 1 } else { 2 });
                for pp in 0..if big { 1 } else { 2 } {
                    let nz = c.dd_nonzeros(pp);
                    ensure(nz == 0, || format!("({p},{qq}) {parity:?} d={d} p={pp}: {nz} nonzeros"))?;
                    checked += 1;
                }
            }
        }
    }
    // 11d composites C^{d,1} → C^{d,3} through the CLI.
    let (_, r) = eleven_dimensional_report()?;
    ensure(r["verdicts"]["dd_zero"] == true, || format!("11d d=2: {}", r["verdicts"]))?;
    let (code, r) = cli(&["cohomology", "--signature", "1,10", "--degree", "4", "--p", "2", "--emit", "dims"])?;
    ensure(code == 0 && r["verdicts"]["dd_zero"] == true, || format!("11d d=4: {}", r["verdicts"]))?;
    Ok(format!("∂∘∂ = 0 on {checked} (signature, parity, d, p) cases plus 11d C^(d,1) → C^(d,3) for d = 2, 4"))
}

fn prolongation(p: usize, qq: usize, count: usize, seed: u64) -> Result<(), String> {
    let m = model(p, qq, Parity::Symmetric);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let sub = GradedSubalgebra::random_highly_supersymmetric(m.clone(), &mut rng).map_err(|e| e.to_string())?;
        let h21 = SpencerComplex::new(sub.host(), 2, 1).cohomology(1, false);
        let h42 = SpencerComplex::new(sub.host(), 4, 2).cohomology(2, false);
        ensure(h21.dim_z == 0 && h21.dim_h == 0 && h42.dim_h == 0, || {
            format!("({p},{qq}) #{i} dim S′={} dim 𝔥={}: Z21={} H21={} H42={}", sub.s_prime().dim(), sub.h().dim(), h21.dim_z, h21.dim_h, h42.dim_h)
        })?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    prolongation(1, 3, 20, 31)?;
    prolongation(1, 10, 20, 1011)?;
    Ok("H^(2,1) = Z^(2,1) = 0 and H^(4,2) = 0 on 20 random subalgebras each in (1,3) and (1,10)".into())
}

fn criterion_4() -> Outcome {
    let mut signatures: Vec<(usize, usize)> = (1..=6).flat_map(|n| (0..=n).map(move |p| (p, n - p))).collect();
    signatures.push((1, 10));
    let mut built = 0;
    for (p, qq) in signatures {
        let sig = Signature::auto(p, qq).map_err(|e| e.to_string())?;
        let module = SpinorModule::minimal(sig).map_err(|e| e.to_string())?;
        for parity in [Parity::Symmetric, Parity::Skew] {
            let Some(kappa) = find_squaring_map(&module, parity) else { continue };
            let m = FlatModel::build(module.clone(), kappa).map_err(|e| format!("({p},{qq}) {parity:?}: {e}"))?;
            let v = m.algebra().super_jacobi_check();
            ensure(v.is_empty(), || format!("({p},{qq}) {parity:?}: {} violations", v.len()))?;
            built += 1;
        }
    }
    Ok(format!("{built} flat models pass the Jacobi oracle"))
}

fn criterion_5() -> Outcome {
    let m = model(1, 10, Parity::Symmetric);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..50 {
        let dim = rng.gen_range(17..=32);
        let vecs: Vec<SparseVec> = (0..dim)
            .map(|_| sparse::from_dense(&(0..32).map(|_| Rational::from_int(rng.gen_range(-3..=3))).collect::<Vec<_>>()))
            .collect();
        let sp = Subspace::from_spanning(32, &vecs);
        let r = restricted_kappa_rank(m.kappa(), sp.basis(), 32);
        ensure(r == 11, || format!("sample {i}: dim S′ = {}, rank {r}", sp.dim()))?;
    }
    Ok("rank κ|⊙²S′ = 11 for 50 random S′ of dimension 17..32".into())
}

fn criterion_6() -> Outcome {
    let cases = [("minimal_1_10.json", model(1, 10, Parity::Symmetric)), ("zero_0_7.json", model(0, 7, Parity::Skew))];
    for (name, m) in cases {
        let save = scratch(name);
        let (code, r) = cli(&["--emit", "dims", "deform", "integrate", inputs(name).to_str().unwrap(), "--save", save.to_str().unwrap()])?;
        ensure(code == 0, || format!("{name}: exit {code}, {}", r["errors"]))?;
        let text = std::fs::read_to_string(&save).map_err(|e| e.to_string())?;
        let def: FilteredDeformation = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let _ = std::fs::remove_file(&save);
        ensure(def.algebra == *m.algebra(), || format!("{name}: bracket tensors differ"))?;
        ensure(def.algebra.to_tensor() == m.algebra().to_tensor(), || format!("{name}: tensors differ"))?;
        let j = def.algebra.super_jacobi_check();
        ensure(j.is_empty(), || format!("{name}: {} Jacobi violations", j.len()))?;
    }
    Ok("zero cocycle gives the graded bracket in (1,10) and (0,7), Jacobi oracle empty".into())
}

fn criterion_7() -> Outcome {
    let save = scratch("sphere.json");
    let (code, r) = cli(&["--emit", "dims", "deform", "integrate", inputs("sphere_0_7.json").to_str().unwrap(), "--save", save.to_str().unwrap()])?;
    ensure(code == 0 && r["result"]["dim"] == 36, || format!("integrate: exit {code}, dim {}", r["result"]["dim"]))?;
    let (code, r) = cli(&["--emit", "dims", "reconstruct", save.to_str().unwrap()])?;
    let _ = std::fs::remove_file(&save);
    ensure(code == 0, || format!("reconstruct: exit {code}, {}", r["verdicts"]))?;
    let cert = &r["result"]["algebra"];
    ensure(cert["dim"] == 36 && cert["center_dim"] == 0, || format!("certificate {cert}"))?;
    let k = &cert["killing"];
    ensure(k["zero"] == 0 && (k["positive"] == 0 || k["negative"] == 0), || format!("Killing inertia {k}"))?;
    // Independent in-process run.
    let m = model(0, 7, Parity::Skew);
    let x = clifford_cocycle(&m, &q(1, 2)).map_err(|e| e.to_string())?;
    let def = integrate(&admissibility_check(&GradedSubalgebra::full(m), x, None).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let c = LieCertificate::of(&def.algebra);
    ensure(c.is_compact_semisimple() && c.dim == 36, || format!("{c:?}"))?;
    Ok(format!(
        "dim 36, center 0, Killing inertia {} positive / {} negative / {} zero, derived algebra dim {}",
        k["positive"], k["negative"], k["zero"], c.derived_dim
    ))
}

/// Admissible data for the integrations used by criteria 8 and 9.
fn instances() -> Vec<(String, AdmissibleData)> {
    let mut out = Vec::new();
    let sphere_model = model(0, 7, Parity::Skew);
    let sphere = clifford_cocycle(&sphere_model, &q(1, 2)).unwrap();
    let l = sphere_model.layout();
    for d in [8, 7, 6, 5] {
        let sp = Subspace::from_spanning(l.s, &(0..d).map(|i| vec![(i, Rational::one())]).collect::<Vec<_>>());
        let h = h_max(&sphere_model, &sp, &sphere.beta).unwrap();
        let sub = GradedSubalgebra::build(sphere_model.clone(), Subspace::full(l.v), sp, h).unwrap();
        out.push((format!("(0,7) sphere, dim S′={d}"), admissibility_check(&sub, sphere.clone(), None).unwrap()));
    }
    let toy = model(1, 3, Parity::Symmetric);
    let l = toy.layout();
    for (i, x) in normalized_cocycle_basis(&toy).into_iter().enumerate() {
        let h = h_max(&toy, &Subspace::full(l.s), &x.beta).unwrap();
        let sub = GradedSubalgebra::build(toy.clone(), Subspace::full(l.v), Subspace::full(l.s), h).unwrap();
        if let Ok(adm) = admissibility_check(&sub, x, None) {
            out.push((format!("(1,3) basis cocycle {i}"), adm));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..6 {
        let sub = GradedSubalgebra::random_highly_supersymmetric(toy.clone(), &mut rng).unwrap();
        let hm = sub.h_matrices().to_vec();
        let inv = invariant_cocycles(&toy, &hm).unwrap();
        let coeffs: Vec<Rational> = (0..inv.len()).map(|_| Rational::from_int(rng.gen_range(-2..=2))).collect();
        let x = NormalizedCocycle::combine(&coeffs, &inv);
        if let Ok(adm) = admissibility_check(&sub, x, None) {
            out.push((format!("(1,3) random subalgebra {i}"), adm));
        }
    }
    let big = model(1, 10, Parity::Symmetric);
    let l = big.layout();
    out.push((
        "(1,10) zero cocycle".into(),
        admissibility_check(&GradedSubalgebra::full(big), NormalizedCocycle::zero(l.v, l.s, l.h), None).unwrap(),
    ));
    out
}

fn criterion_8(instances: &[(String, AdmissibleData)]) -> Outcome {
    let mut nonzero = 0;
    for (name, adm) in instances {
        let def = integrate(adm).map_err(|e| format!("{name}: {e}"))?;
        let inv = deformation_invariance_checks(&def).map_err(|e| format!("{name}: {e}"))?;
        ensure(inv.passed(), || format!("{name}: invariance {inv:?}"))?;
        let rec = reconstruct(&def).map_err(|e| format!("{name}: {e}"))?;
        ensure(rec.levi_civita_mismatches.is_empty(), || format!("{name}: L ≠ A + λ(v) at {:?}", rec.levi_civita_mismatches))?;
        ensure(rec.killing_spinor.passed(), || format!("{name}: Killing spinor {:?}", rec.killing_spinor))?;
        ensure(rec.flatness.passed(), || format!("{name}: flatness {:?}", rec.flatness))?;
        if !adm.cocycle.is_zero() {
            nonzero += 1;
        }
    }
    Ok(format!("{} integrations ({nonzero} with nonzero cocycle): invariance, L = A + λ(v), Killing spinor, flatness on S′", instances.len()))
}

fn criterion_9(instances: &[(String, AdmissibleData)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut perturbed = 0;
    for (name, adm) in instances {
        if adm.kernel.dim() == 0 {
            continue;
        }
        let base = integrate(adm).map_err(|e| format!("{name}: {e}"))?;
        let coeffs: Vec<Vec<Rational>> = (0..adm.section.columns.len())
            .map(|_| (0..adm.kernel.dim()).map(|_| Rational::new(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect())
            .collect();
        let other = adm.section.shifted(&adm.kernel, &coeffs);
        ensure(other != adm.section && other.differs_by_kernel_map(&adm.section, &adm.kernel), || format!("{name}: bad perturbation"))?;
        let again = integrate(&adm.with_section(other).map_err(|e| format!("{name}: {e}"))?).map_err(|e| format!("{name}: {e}"))?;
        ensure(again.provenance.theta_tilde == base.provenance.theta_tilde, || format!("{name}: θ̃ changed"))?;
        perturbed += 1;
    }
    Ok(format!("θ̃ unchanged under Σ + (map into 𝔇) on {perturbed} integrations"))
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    for (p, qq) in [(1, 2), (1, 3), (1, 10)] {
        let m = model(p, qq, Parity::Symmetric);
        let good = check_causal(m.kappa(), m.module(), 10_000, 10 + qq as u64);
        ensure(good.passed(), || format!("({p},{qq}): counterexample {:?}", good.counterexample))?;
        let bad = check_causal(&m.kappa().negated(), m.module(), 1000, 20 + qq as u64);
        ensure(!bad.passed(), || format!("({p},{qq}): sign-flipped κ passed"))?;
        lines.push(format!("({p},{qq})"));
    }
    Ok(format!("10⁴ samples causal and sign flip caught in {}", lines.join(", ")))
}

fn main() {
    let start = Instant::now();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail} [{secs:.1}s]");
            }
        }
    };
    report(1, "11d cohomology", &mut criterion_1);
    report(2, "∂∘∂ = 0", &mut criterion_2);
    report(3, "prolongation", &mut criterion_3);
    report(4, "Jacobi oracle", &mut criterion_4);
    report(5, "homogeneity", &mut criterion_5);
    report(6, "integration round trip", &mut criterion_6);
    report(7, "sphere realization", &mut criterion_7);
    let inst = instances();
    report(8, "integration consistency", &mut || criterion_8(&inst));
    report(9, "section independence", &mut || criterion_9(&inst));
    report(10, "causality sampling", &mut criterion_10);
    println!("acceptance: {} of 10 criteria passed in {:.1}s", 10 - failures, start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
