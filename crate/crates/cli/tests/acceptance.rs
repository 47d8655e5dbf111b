//! Acceptance suite. Prints one line per criterion and exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use hspec_core::constructions::{alpha_profile, refinement_sequence, sym};
use hspec_core::harness::{gen_law_input, gen_matrix, gen_matrix_dim, run_campaign, trial_rng, GenConfig};
use hspec_core::laws::{evaluate_spec, find_law, Chain, Ctx, LawSpec, Mode, Tolerances};
use hspec_core::matrix::NonnegMatrix;
use hspec_core::spectral::{certified_radius, evaluate_certified, CertifiedValue, Functional, SpectralOptions};
use num::{BigRational, Signed, Zero};

type Outcome = Result<String, String>;

fn opts() -> SpectralOptions {
    SpectralOptions::default()
}

/// `a <= b` with the default law slack plus both certification widths.
fn leq(a: &CertifiedValue, b: &CertifiedValue) -> bool {
    a.value <= b.value * (1.0 + 1e-9) + 1e-12 + a.width() + b.width()
}

// Exact polynomial arithmetic over the rationals, coefficients lowest degree first.

type Poly = Vec<BigRational>;

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &Poly) -> Poly {
    let d: Poly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer((i as i64).into())).collect();
    if d.is_empty() {
        vec![BigRational::zero()]
    } else {
        trim(d)
    }
}

fn is_zero(p: &Poly) -> bool {
    p.iter().all(Zero::is_zero)
}

fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = trim(a.clone());
    let b = trim(b.clone());
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut quo = vec![BigRational::zero(); r.len().saturating_sub(db).max(1)];
    while !is_zero(&r) && r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &c * bi;
        }
        quo[shift] = c;
        r.pop();
        r = trim(r);
    }
    (trim(quo), r)
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !is_zero(&b) {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let g = gcd(p, &derivative(p));
    let (sq, _) = divrem(p, &g);
    let mut chain = vec![sq.clone(), derivative(&sq)];
    loop {
        let n = chain.len();
        if is_zero(&chain[n - 1]) {
            chain.pop();
            break;
        }
        let (_, r) = divrem(&chain[n - 2], &chain[n - 1]);
        if is_zero(&r) {
            break;
        }
        chain.push(r.into_iter().map(|c| -c).collect());
    }
    chain
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let s: Vec<i8> = signs.filter(|&s| s != 0).collect();
    s.windows(2).filter(|w| w[0] != w[1]).count()
}

fn sign(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Number of distinct real roots strictly above `x`.
fn roots_above(chain: &[Poly], x: &BigRational) -> usize {
    let at_x = sign_changes(chain.iter().map(|p| sign(&eval(p, x))));
    let at_inf = sign_changes(chain.iter().map(|p| sign(p.last().unwrap())));
    at_x - at_inf
}

/// Characteristic polynomial `det(λI - K)` of a 2×2 or 3×3 matrix.
fn char_poly(k: &NonnegMatrix) -> Poly {
    let a = |i, j| q(k.get(i, j));
    let one = BigRational::from_integer(1.into());
    match k.dim() {
        2 => {
            let tr = a(0, 0) + a(1, 1);
            let det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
            vec![det, -tr, one]
        }
        3 => {
            let tr = a(0, 0) + a(1, 1) + a(2, 2);
            let minor = |i, j| a(i, i) * a(j, j) - a(i, j) * a(j, i);
            let c2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
            vec![-det, c2, -tr, one]
        }
        n => panic!("no characteristic polynomial for dimension {n}"),
    }
}

/// Whether the largest real root of the characteristic polynomial lies in `[lo, hi]`.
fn perron_root_in(k: &NonnegMatrix, lo: f64, hi: f64) -> bool {
    let p = char_poly(k);
    let chain = sturm_chain(&p);
    let (lo, hi) = (q(lo), q(hi));
    roots_above(&chain, &hi) == 0 && (roots_above(&chain, &lo) >= 1 || eval(&p, &lo).is_zero())
}

fn law_campaign(dir: &Path, workers: &str) -> Result<(String, f64), String> {
    let json = dir.join(format!("campaign-{workers}.json"));
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hspec"))
        .args(["check", "--law", "all", "--trials", "1000", "--seed", "42", "--max-dim", "8", "--workers", workers])
        .arg("--json")
        .arg(&json)
        .output()
        .map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    if out.status.code() == Some(2) {
        return Err(String::from_utf8_lossy(&out.stderr).trim().to_string());
    }
    let text = std::fs::read_to_string(&json).map_err(|e| e.to_string())?;
    Ok((text, secs))
}

fn criterion_1_and_8() -> (Outcome, Outcome) {
    let dir = tempfile::tempdir().expect("tempdir");
    let runs = (law_campaign(dir.path(), "1"), law_campaign(dir.path(), "8"));
    let (one, eight) = match runs {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return (Err(e.clone()), Err(e)),
    };
    let c1 = (|| {
        let v: serde_json::Value = serde_json::from_str(&eight.0).map_err(|e| e.to_string())?;
        let fails = v["total_failures"].as_u64().ok_or("missing total_failures")?;
        let rows = v["rows"].as_array().ok_or("missing rows")?;
        let skips: u64 = rows.iter().map(|r| r["skip"].as_u64().unwrap_or(0)).sum();
        let worst = one.1.max(eight.1);
        let detail = format!("{} cells, {fails} counterexamples, {skips} skipped trials, {worst:.1}s", rows.len());
        if fails == 0 && worst <= 600.0 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })();
    let c8 = if one.0 == eight.0 {
        Ok(format!("{} bytes identical", one.0.len()))
    } else {
        Err("reports differ between 1 and 8 workers".into())
    };
    (c1, c8)
}

fn criterion_2() -> Outcome {
    // The oracle itself must separate a true bracket from near misses.
    let k = NonnegMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
    let r = (5.0 + 33f64.sqrt()) / 2.0;
    let z = NonnegMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
    let oracle_ok = perron_root_in(&k, r - 1e-12, r + 1e-12)
        && !perron_root_in(&k, r + 1e-12, r + 1.0)
        && !perron_root_in(&k, r - 1.0, r - 1e-12)
        && perron_root_in(&z, 0.0, 0.0)
        && !perron_root_in(&z, 1e-300, 1.0);
    if !oracle_ok {
        return Err("oracle self-check failed".into());
    }
    let cfg = GenConfig::default();
    let mut outside = 0;
    let mut wide = 0;
    let mut total = 0;
    for (n, count) in [(2usize, 10_000usize), (3, 1_000)] {
        for t in 0..count {
            let mut rng = trial_rng(2, "spectral-oracle", None, n * 100_000 + t);
            let k = gen_matrix_dim(&cfg, n, &mut rng);
            let cv = certified_radius(&k, &opts());
            total += 1;
            if !perron_root_in(&k, cv.lo, cv.hi) {
                outside += 1;
            }
            let narrow = cv.width() <= f64::max(1e-10 * cv.value, 1e-14);
            if !narrow {
                wide += 1;
            }
        }
    }
    let detail = format!("{total} matrices, {outside} brackets miss the root, {wide} too wide");
    if outside == 0 && wide == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let k = NonnegMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
    let get = |f| evaluate_certified(f, &k, &opts()).map_err(|e| e.to_string());
    let r = get(Functional::SpectralRadius)?;
    let op2 = get(Functional::OpNorm2)?;
    let w = get(Functional::NumericalRadius)?;
    let detail = format!("r = {:.9}, w = {:.9}, op2 = {:.9}", r.value, w.value, op2.value);
    let close = (r.value - 5.372281323).abs() <= 1e-8
        && (op2.value - 5.464985705).abs() <= 1e-8
        && (w.value - 5.415475947).abs() <= 1e-8;
    if close && r.value <= w.value && w.value <= op2.value {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let cfg = GenConfig { min_dim: 2, max_dim: 6, ..Default::default() };
    let mut bad = 0;
    for t in 0..500 {
        let k = gen_matrix(&cfg, &mut trial_rng(4, "refinement", None, t));
        let seq =
            refinement_sequence(&k, 0.5, None, 4, Functional::SpectralRadius, &opts()).map_err(|e| e.to_string())?;
        let mut all = seq.brackets.clone();
        all.push(seq.cap_bracket);
        if !all.windows(2).all(|w| leq(&w[0], &w[1])) {
            bad += 1;
        }
    }
    let cycle = NonnegMatrix::from_rows(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
    let seq =
        refinement_sequence(&cycle, 0.5, None, 4, Functional::SpectralRadius, &opts()).map_err(|e| e.to_string())?;
    let cycle_ok = seq.values.iter().all(|&v| v == 0.0) && (seq.cap - 1.0).abs() <= 1e-12;
    let detail = format!("{bad} of 500 sequences out of order, 3-cycle values {:?} cap {}", seq.values, seq.cap);
    if bad == 0 && cycle_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Outcome {
    let cfg = GenConfig::default();
    let mut bad = 0;
    for f in [Functional::SpectralRadius, Functional::OpNorm2, Functional::NumericalRadius] {
        for t in 0..200 {
            let k = gen_matrix(&cfg, &mut trial_rng(5, "profile", Some(f), t));
            let p = alpha_profile(&k, f, 21, &opts()).map_err(|e| e.to_string())?;
            let v = &p.brackets;
            let ok = (0..10).all(|i| leq(&v[i + 1], &v[i]) && leq(&v[19 - i], &v[20 - i]))
                && (0..21).all(|i| leq(&v[i], &v[20 - i]));
            if !ok {
                bad += 1;
            }
        }
    }
    let detail = format!("{bad} of 600 profiles violate shape");
    if bad == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let cfg = GenConfig::default();
    let mut bad = 0;
    let mut worst = 0.0f64;
    for t in 0..10_000 {
        let k = gen_matrix_dim(&cfg, 2, &mut trial_rng(6, "sharpness", None, t));
        let s = sym(&k, 0.5, 0.5).map_err(|e| e.to_string())?;
        let a = certified_radius(&k, &opts()).value;
        let b = certified_radius(&s, &opts()).value;
        let scale = a.max(b);
        let rel = if scale > 0.0 { (a - b).abs() / scale } else { 0.0 };
        worst = worst.max(rel);
        if rel > 1e-9 {
            bad += 1;
        }
    }
    let detail = format!("{bad} of 10000 exceed 1e-9, worst relative difference {worst:.2e}");
    if bad == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7() -> Outcome {
    let cfg = GenConfig { min_dim: 1, max_dim: 6, ..Default::default() };
    let tol = Tolerances::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for id in ["L02", "L05", "L07", "L10", "L27"] {
        let law = find_law(id).map_err(|e| e.to_string())?;
        assert_eq!(law.mode, Mode::Entrywise);
        let (mut bad, mut skipped, mut worst) = (0, 0, 0.0f64);
        for t in 0..1000 {
            let mut rng = trial_rng(7, id, None, t);
            let report = gen_law_input(&law, &cfg, None, &mut rng).and_then(|input| evaluate_spec(&law, &input, &tol));
            let report = match report {
                Ok(r) => r,
                Err(_) => {
                    skipped += 1;
                    continue;
                }
            };
            let mut trial_ok = report.passed();
            for link in &report.links {
                if let Some(scale) = link.rhs_scale {
                    worst = worst.max(link.worst_gap / scale.max(f64::MIN_POSITIVE));
                    trial_ok &= link.worst_gap <= 1e-10 * scale;
                }
            }
            if !trial_ok {
                bad += 1;
            }
        }
        ok &= bad == 0;
        lines.push(format!("{id} {bad} bad {skipped} skipped worst {worst:.1e}"));
    }
    let detail = lines.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `Π r(K_i)^α_i <= r(∘ K_i^(α_i))`, the reverse of a true bound.
fn reversed_mean(c: &Ctx<'_>) -> hspec_core::Result<Chain> {
    let w = c.weights();
    let mean = c.rho(&hspec_core::constructions::weighted_gmean(c.mats(), w)?)?;
    let mut prod = CertifiedValue::exact(1.0);
    for (k, &a) in c.mats().iter().zip(w.alphas()) {
        prod = prod * c.rho(k)?.powf(a);
    }
    Ok(Chain::from_values(vec![("Π r(K_i)^α_i".into(), prod), ("r(∘ K_i^(α_i))".into(), mean)]))
}

fn criterion_9() -> Outcome {
    let base = find_law("L01").map_err(|e| e.to_string())?;
    let law = LawSpec {
        id: "X1",
        name: "reversed mean",
        statement: "false on purpose",
        shape: base.shape,
        functionals: &[Functional::SpectralRadius],
        w_needs_convex: false,
        mode: Mode::ScalarChain,
        eval: reversed_mean,
    };
    let cfg = GenConfig { seed: 42, max_dim: 6, ..Default::default() };
    let rep = run_campaign(&[law], 100, &cfg, &Tolerances::default(), 4).map_err(|e| e.to_string())?;
    let first = rep.counterexamples.iter().min_by_key(|c| c.trial);
    let small = rep.counterexamples.iter().filter(|c| c.input.dim() <= 2).count();
    let detail = match first {
        Some(c) => format!(
            "first failure at trial {} shrunk to dimension {} in {} steps, {small} of {} counterexamples at dimension <= 2",
            c.trial,
            c.input.dim(),
            c.shrink_steps,
            rep.counterexamples.len()
        ),
        None => "no failure in 100 trials".into(),
    };
    if first.is_some_and(|c| c.trial < 100 && c.input.dim() <= 2) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let (c1, c8) = criterion_1_and_8();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 law campaign", c1),
        ("2 spectral oracle", criterion_2()),
        ("3 named values", criterion_3()),
        ("4 dyadic monotonicity", criterion_4()),
        ("5 alpha profile shape", criterion_5()),
        ("6 2x2 symmetrization sharpness", criterion_6()),
        ("7 entrywise exactness", criterion_7()),
        ("8 determinism", c8),
        ("9 harness self-test", criterion_9()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(d) => println!("PASS {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
