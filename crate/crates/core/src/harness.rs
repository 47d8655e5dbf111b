//! Seeded input generation, fuzz campaigns over the catalog and shrinking of
//! failing inputs.

use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::laws::{
    evaluate_spec, AlphaDomain, BetaDomain, Filter, GridDims, LawInput, LawReport, LawSpec, Matrices, Parity, PermRule,
    Tolerances, WeightRule,
};
use crate::matrix::{NonnegMatrix, Permutation, Weights};
use crate::spectral::Functional;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryModel {
    Uniform01,
    /// `exp(U(ln lo, ln hi))`.
    LogUniform {
        lo: f64,
        hi: f64,
    },
    /// Integers in `0..=9`.
    SmallInt,
}

impl Default for EntryModel {
    fn default() -> Self {
        EntryModel::LogUniform { lo: 1e-6, hi: 1e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub min_dim: usize,
    pub max_dim: usize,
    pub entry_model: EntryModel,
    pub zero_density: f64,
    pub structured_injection_rate: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            min_dim: 1,
            max_dim: 4,
            entry_model: EntryModel::default(),
            zero_density: 0.2,
            structured_injection_rate: 0.1,
        }
    }
}

/// Largest dimension a generator may be asked for.
pub const MAX_GEN_DIM: usize = 64;

/// Attempts made for laws whose hypothesis is enforced by filtering.
pub const FILTER_ATTEMPTS: usize = 1000;

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.min_dim && self.min_dim <= self.max_dim && self.max_dim <= MAX_GEN_DIM) {
            return Err(Error::InvalidArgument(format!(
                "dimensions must satisfy 1 <= min_dim <= max_dim <= {MAX_GEN_DIM}, got {}..{}",
                self.min_dim, self.max_dim
            )));
        }
        for (p, name) in
            [(self.zero_density, "zero_density"), (self.structured_injection_rate, "structured_injection_rate")]
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} = {p} must lie in [0, 1]")));
            }
        }
        if let EntryModel::LogUniform { lo, hi } = self.entry_model {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!("log-uniform range [{lo}, {hi}] is invalid")));
            }
        }
        Ok(())
    }
}

fn entry<R: Rng + ?Sized>(model: EntryModel, rng: &mut R) -> f64 {
    match model {
        EntryModel::Uniform01 => rng.random::<f64>(),
        EntryModel::LogUniform { lo, hi } => {
            if lo == hi {
                lo
            } else {
                rng.random_range(lo.ln()..=hi.ln()).exp()
            }
        }
        EntryModel::SmallInt => rng.random_range(0..=9) as f64,
    }
}

/// A random square matrix of dimension `n`.
pub fn gen_matrix_dim<R: Rng + ?Sized>(cfg: &GenConfig, n: usize, rng: &mut R) -> NonnegMatrix {
    if rng.random_bool(cfg.structured_injection_rate) {
        return structured(cfg, n, rng);
    }
    let data =
        (0..n * n).map(|_| if rng.random_bool(cfg.zero_density) { 0.0 } else { entry(cfg.entry_model, rng) }).collect();
    NonnegMatrix::from_vec(n, data).expect("generated entries are finite and nonnegative")
}

/// A random matrix whose dimension is drawn from `[min_dim, max_dim]`.
pub fn gen_matrix<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> NonnegMatrix {
    let n = rng.random_range(cfg.min_dim..=cfg.max_dim);
    gen_matrix_dim(cfg, n, rng)
}

fn random_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Permutation::new(v).expect("shuffled identity")
}

/// Zero, identity, permutation, rank-one, diagonal or nilpotent.
fn structured<R: Rng + ?Sized>(cfg: &GenConfig, n: usize, rng: &mut R) -> NonnegMatrix {
    let kind = rng.random_range(0..6);
    let mut e = || entry(cfg.entry_model, rng);
    match kind {
        0 => NonnegMatrix::zeros(n),
        1 => NonnegMatrix::identity(n),
        2 => {
            let mut v: Vec<usize> = (0..n).collect();
            v.shuffle(rng);
            NonnegMatrix::permutation(&Permutation::new(v).expect("shuffled identity"))
        }
        3 => {
            let u: Vec<f64> = (0..n).map(|_| e()).collect();
            let v: Vec<f64> = (0..n).map(|_| e()).collect();
            let data = (0..n * n).map(|k| u[k / n] * v[k % n]).collect();
            NonnegMatrix::from_vec(n, data).expect("finite rank-one product")
        }
        4 => {
            let d: Vec<f64> = (0..n).map(|_| e()).collect();
            NonnegMatrix::diagonal(&d).expect("nonnegative diagonal")
        }
        _ => {
            let data = (0..n * n).map(|k| if k % n > k / n { e() } else { 0.0 }).collect();
            NonnegMatrix::from_vec(n, data).expect("strictly upper triangular")
        }
    }
}

/// Convex weights from a uniform simplex draw.
fn simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let xs: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = xs.iter().sum();
    let mut w: Vec<f64> = xs.iter().map(|x| x / s).collect();
    // Put the rounding residue on the last weight so the sum is 1 to a few ulps.
    let head: f64 = w[..n - 1].iter().sum();
    w[n - 1] = (1.0 - head).max(0.0);
    w
}

fn gen_weights<R: Rng + ?Sized>(rule: WeightRule, n: usize, convex: bool, rng: &mut R) -> Option<Weights> {
    let w = simplex(n, rng);
    let w = match rule {
        WeightRule::None => return None,
        WeightRule::SuperUnit if !convex => {
            let scale = rng.random_range(1.0..=3.0);
            w.iter().map(|x| x * scale).collect()
        }
        _ => w,
    };
    Some(Weights::new(w).expect("simplex weights are valid"))
}

fn gen_count<R: Rng + ?Sized>(min: usize, max: usize, parity: Parity, rng: &mut R) -> usize {
    let choices: Vec<usize> = (min..=max)
        .filter(|m| match parity {
            Parity::Any => true,
            Parity::Even => m % 2 == 0,
            Parity::Odd => m % 2 == 1,
        })
        .collect();
    *choices.choose(rng).expect("nonempty count range")
}

/// A random input satisfying the law's input shape, for functional `f`.
pub fn gen_law_input<R: Rng + ?Sized>(
    law: &LawSpec,
    cfg: &GenConfig,
    f: Option<Functional>,
    rng: &mut R,
) -> Result<LawInput> {
    let attempts = if law.shape.filter.is_some() { FILTER_ATTEMPTS } else { 1 };
    for _ in 0..attempts {
        let input = gen_once(law, cfg, f, rng);
        if law.shape.filter.is_none() || crate::laws::validate_input(law, &input).is_ok() {
            return Ok(input);
        }
    }
    Err(Error::Unsatisfiable(law.id.into()))
}

fn gen_once<R: Rng + ?Sized>(law: &LawSpec, cfg: &GenConfig, f: Option<Functional>, rng: &mut R) -> LawInput {
    let shape = &law.shape;
    let n = rng.random_range(cfg.min_dim..=cfg.max_dim);
    let mut input = LawInput { functional: f, ..Default::default() };
    let mats = |k: usize, rng: &mut R| (0..k).map(|_| gen_matrix_dim(cfg, n, rng)).collect::<Vec<_>>();
    let weighted = match shape.matrices {
        Matrices::Exactly(k) => {
            input.matrices = mats(k, rng);
            0
        }
        Matrices::List => {
            let k = rng.random_range(1..=4);
            input.matrices = mats(k, rng);
            k
        }
        Matrices::Grid => {
            let (l, k) = (rng.random_range(1..=3), rng.random_range(1..=3));
            input.grid = Some(GridDims { rows: l, cols: k });
            input.matrices = mats(l * k, rng);
            k
        }
        Matrices::Pairs => {
            let k = rng.random_range(1..=3);
            input.matrices = mats(2 * k, rng);
            0
        }
        Matrices::Family { min, max } => {
            let k = gen_count(min, max, shape.parity, rng);
            input.matrices = mats(k, rng);
            0
        }
        Matrices::BaseWithDiagonals => {
            let base = mats(1, rng);
            let k = rng.random_range(1..=4);
            let ds =
                (0..k).map(|_| (0..n).map(|i| entry(cfg.entry_model, rng) - base[0].get(i, i)).collect()).collect();
            input.matrices = base;
            input.diag_perturbations = Some(ds);
            k
        }
    };
    let count = input.matrices.len();
    let convex_for_w = law.w_needs_convex && f == Some(Functional::NumericalRadius);
    input.weights = gen_weights(shape.weights, weighted.max(1), convex_for_w, rng);
    match shape.perms {
        PermRule::None => {}
        PermRule::Tau => input.tau = Some(random_perm(count, rng)),
        PermRule::TauNu => {
            input.tau = Some(random_perm(count, rng));
            input.nu = Some(random_perm(count, rng));
        }
    }

    let rule = &shape.exponents;
    let e = &mut input.exponents;
    if rule.t {
        e.t = Some(rng.random_range(1.0..=4.0));
    }
    if rule.m {
        e.m = Some(rng.random_range(1..=3));
    }
    if rule.l {
        e.l = Some(rng.random_range(1..=3));
    }
    if rule.mix {
        e.mix = Some(rng.random::<f64>());
    }
    if rule.depth {
        e.depth = Some(rng.random_range(0..=4));
    }
    if rule.grid_points {
        e.grid_points = Some(2 * rng.random_range(1..=5) + 1);
    }
    let unit = |rng: &mut R| match rng.random_range(0..8) {
        0 => 0.0,
        1 => 1.0,
        2 => 0.5,
        _ => rng.random::<f64>(),
    };
    match (rule.alpha, rule.beta) {
        (AlphaDomain::None, _) => {}
        (AlphaDomain::Unit, _) => e.alpha = Some(unit(rng)),
        (AlphaDomain::AtLeast(c), _) => e.alpha = Some(c + rng.random_range(0.0..=1.5)),
        (AlphaDomain::AtLeastPerMatrix(c), _) => e.alpha = Some(c / count as f64 + rng.random_range(0.0..=1.5)),
        (AlphaDomain::Nonnegative, BetaDomain::Optional) if rng.random_bool(0.5) => e.alpha = Some(unit(rng)),
        (AlphaDomain::Nonnegative, _) => {
            let a = rng.random_range(0.0..=2.0);
            e.alpha = Some(a);
            e.beta = Some((1.0 - a).max(0.0) + rng.random_range(0.0..=1.0));
        }
    }

    if shape.filter == Some(Filter::ZeroDiagonalMean) {
        impose_zero_diagonal_mean(&mut input, rng);
    }
    input
}

/// Makes one column of the grid have products with zero diagonal: a single
/// factor loses its diagonal, longer columns become strictly triangular.
fn impose_zero_diagonal_mean<R: Rng + ?Sized>(input: &mut LawInput, rng: &mut R) {
    let g = input.grid.expect("grid law");
    let col = rng.random_range(0..g.cols);
    let upper = rng.random_bool(0.5);
    for row in 0..g.rows {
        let k = &mut input.matrices[row * g.cols + col];
        let n = k.dim();
        let data = (0..n * n)
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let keep = if g.rows == 1 {
                    i != j
                } else if upper {
                    j > i
                } else {
                    j < i
                };
                if keep {
                    k.get(i, j)
                } else {
                    0.0
                }
            })
            .collect();
        *k = NonnegMatrix::from_vec(n, data).expect("masked matrix");
    }
}

/// Deterministic per-trial stream keyed by `(seed, law, functional, trial)`.
pub fn trial_rng(seed: u64, law_id: &str, f: Option<Functional>, trial: usize) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(law_id.as_bytes());
    h.update([0u8]);
    h.update(f.map_or("entrywise", Functional::long_name).as_bytes());
    h.update([0u8]);
    h.update((trial as u64).to_le_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub law_id: String,
    pub trial: usize,
    pub input: LawInput,
    pub report: LawReport,
    pub shrink_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub law: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    pub trials: usize,
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    /// Largest [`LawReport::slack_fraction`] over passing trials.
    pub max_slack_consumed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub rows: Vec<CampaignRow>,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl CampaignReport {
    pub fn total_failures(&self) -> usize {
        self.rows.iter().map(|r| r.fail).sum()
    }
}

enum Outcome {
    Pass(f64),
    Fail(Box<Counterexample>),
    Skip,
}

/// Whether `input` fails at `tol` and again at a 10× tighter spectral tolerance.
pub fn fails(law: &LawSpec, input: &LawInput, tol: &Tolerances) -> Option<LawReport> {
    let rep = evaluate_spec(law, input, tol).ok().filter(|r| !r.passed())?;
    let tight = Tolerances { spectral: tol.spectral.tightened(10.0), ..*tol };
    evaluate_spec(law, input, &tight).ok().filter(|r| !r.passed()).map(|_| rep)
}

fn run_trial(law: &LawSpec, f: Option<Functional>, trial: usize, cfg: &GenConfig, tol: &Tolerances) -> Outcome {
    let mut rng = trial_rng(cfg.seed, law.id, f, trial);
    let Ok(input) = gen_law_input(law, cfg, f, &mut rng) else {
        return Outcome::Skip;
    };
    match evaluate_spec(law, &input, tol) {
        Ok(rep) if rep.passed() => Outcome::Pass(rep.slack_fraction()),
        Ok(_) => match fails(law, &input, tol) {
            Some(report) => {
                let c = Counterexample { law_id: law.id.into(), trial, input, report, shrink_steps: 0 };
                Outcome::Fail(Box::new(shrink(law, c, tol)))
            }
            None => Outcome::Pass(0.0),
        },
        Err(_) => Outcome::Skip,
    }
}

/// Runs `trials` inputs per law and admissible functional on `workers`
/// threads. The result does not depend on `workers`.
pub fn run_campaign(
    laws: &[LawSpec],
    trials: usize,
    cfg: &GenConfig,
    tol: &Tolerances,
    workers: usize,
) -> Result<CampaignReport> {
    cfg.validate()?;
    tol.validate()?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidArgument("worker count must be at least 1".into()));
    }
    let start = Instant::now();
    let mut cells: Vec<(&LawSpec, Option<Functional>)> =
        laws.iter().flat_map(|l| l.campaign_functionals().into_iter().map(move |f| (l, f))).collect();
    cells.sort_by(|a, b| (a.0.id, a.1).cmp(&(b.0.id, b.1)));
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcomes: Vec<Outcome> =
        pool.install(|| jobs.par_iter().map(|&(c, t)| run_trial(cells[c].0, cells[c].1, t, cfg, tol)).collect());

    let mut rows: Vec<CampaignRow> = cells
        .iter()
        .map(|(l, f)| CampaignRow {
            law: l.id.into(),
            functional: *f,
            trials,
            pass: 0,
            fail: 0,
            skip: 0,
            max_slack_consumed: 0.0,
        })
        .collect();
    let mut counterexamples = Vec::new();
    for (&(c, _), out) in jobs.iter().zip(outcomes) {
        let row = &mut rows[c];
        match out {
            Outcome::Pass(g) => {
                row.pass += 1;
                row.max_slack_consumed = row.max_slack_consumed.max(g);
            }
            Outcome::Fail(cx) => {
                row.fail += 1;
                counterexamples.push(*cx);
            }
            Outcome::Skip => row.skip += 1,
        }
    }
    Ok(CampaignReport { rows, counterexamples, wall_time_secs: start.elapsed().as_secs_f64() })
}

/// Upper bound on evaluations spent by one call to [`shrink`].
pub const SHRINK_BUDGET: usize = 20_000;

/// Greedily simplifies a failing input while it keeps failing: removes
/// matrices, deletes indices, zeroes entries and rounds to 3 significant
/// digits, until no reduction applies.
pub fn shrink(law: &LawSpec, mut c: Counterexample, tol: &Tolerances) -> Counterexample {
    let mut budget = SHRINK_BUDGET;
    'outer: loop {
        for cand in candidates(&c.input) {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            if let Some(rep) = fails(law, &cand, tol) {
                c.input = cand;
                c.report = rep;
                c.shrink_steps += 1;
                continue 'outer;
            }
        }
        break;
    }
    c
}

/// Reduction candidates, coarsest first.
fn candidates(input: &LawInput) -> Vec<LawInput> {
    let mut out = Vec::new();
    let count = input.matrices.len();

    // Remove one matrix, one grid row or column, or one diagonal perturbation.
    if let Some(g) = input.grid {
        for col in 0..g.cols {
            if g.cols > 1 {
                let mut c = input.clone();
                c.matrices = input
                    .matrices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i % g.cols != col)
                    .map(|(_, m)| m.clone())
                    .collect();
                c.grid = Some(GridDims { rows: g.rows, cols: g.cols - 1 });
                c.weights = input.weights.as_ref().and_then(|w| drop_weight(w, col));
                out.push(c);
            }
        }
        for row in 0..g.rows {
            if g.rows > 1 {
                let mut c = input.clone();
                c.matrices.drain(row * g.cols..(row + 1) * g.cols);
                c.grid = Some(GridDims { rows: g.rows - 1, cols: g.cols });
                out.push(c);
            }
        }
    } else if let Some(ds) = &input.diag_perturbations {
        for k in 0..ds.len() {
            if ds.len() > 1 {
                let mut c = input.clone();
                c.diag_perturbations.as_mut().expect("present").remove(k);
                c.weights = input.weights.as_ref().and_then(|w| drop_weight(w, k));
                out.push(c);
            }
        }
    } else if count > 1 {
        for k in 0..count {
            let mut c = input.clone();
            c.matrices.remove(k);
            c.weights = input.weights.as_ref().and_then(|w| drop_weight(w, k));
            c.tau = input.tau.as_ref().and_then(|p| drop_from_perm(p, k));
            c.nu = input.nu.as_ref().and_then(|p| drop_from_perm(p, k));
            out.push(c);
        }
    }

    // Delete one index from every matrix.
    let n = input.dim();
    if n > 1 {
        for i in 0..n {
            let mut c = input.clone();
            c.matrices = input.matrices.iter().map(|m| m.delete_index(i).expect("index in range")).collect();
            if let Some(ds) = c.diag_perturbations.as_mut() {
                for d in ds {
                    d.remove(i);
                }
            }
            out.push(c);
        }
    }

    // Zero one entry.
    for (k, m) in input.matrices.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if m.get(i, j) != 0.0 {
                    let mut c = input.clone();
                    c.matrices[k] = m.with_entry(i, j, 0.0).expect("zero is a valid entry");
                    out.push(c);
                }
            }
        }
    }

    // Round everything to 3 significant digits.
    let rounded: Vec<NonnegMatrix> =
        input.matrices.iter().map(|m| m.map(round3).expect("rounding keeps entries nonnegative")).collect();
    if rounded != input.matrices {
        let mut c = input.clone();
        c.matrices = rounded;
        out.push(c);
    }
    out
}

fn round3(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let p = 10f64.powi(2 - x.abs().log10().floor() as i32);
    let r = (x * p).round() / p;
    if r.is_finite() {
        r
    } else {
        x
    }
}

/// Drops weight `k` and rescales the rest to keep the same sum.
fn drop_weight(w: &Weights, k: usize) -> Option<Weights> {
    let mut a = w.alphas().to_vec();
    a.remove(k);
    let rest: f64 = a.iter().sum();
    if rest <= 0.0 {
        return None;
    }
    Weights::new(a.iter().map(|x| x * w.sum() / rest).collect()).ok()
}

/// The permutation induced on the remaining positions after removing `k`.
fn drop_from_perm(p: &Permutation, k: usize) -> Option<Permutation> {
    let img: Vec<usize> = p.image().iter().filter(|&&v| v != k).map(|&v| if v > k { v - 1 } else { v }).collect();
    Permutation::new(img).ok()
}
