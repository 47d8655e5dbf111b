//! Certified evaluation of spectral radius, induced norms, numerical radius
//! and the max-entry norm of nonnegative matrices.
//!
//! The spectral radius is bracketed with Collatz–Wielandt quotients: for any
//! nonnegative `B` and strictly positive `x`,
//! `min_i (Bx)_i / x_i <= r(B) <= max_i (Bx)_i / x_i`.
//! The matrix is split into its strongly connected components (the diagonal
//! blocks of its Frobenius normal form), `r(A)` is the largest block radius,
//! and each irreducible block is driven to its Perron vector by shifted
//! inverse (Noda) steps with a shifted power step as fallback. Every iterate
//! stays strictly positive, so every quotient pair is a valid bracket.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::NonnegMatrix;

/// The functionals the inequality catalog ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Functional {
    #[serde(rename = "spectral-radius")]
    SpectralRadius,
    #[serde(rename = "op-norm-1")]
    OpNorm1,
    #[serde(rename = "op-norm-2")]
    OpNorm2,
    #[serde(rename = "op-norm-inf")]
    OpNormInf,
    #[serde(rename = "numerical-radius")]
    NumericalRadius,
    #[serde(rename = "max-entry")]
    MaxEntry,
}

impl Functional {
    pub const ALL: [Functional; 6] = [
        Functional::SpectralRadius,
        Functional::OpNorm1,
        Functional::OpNorm2,
        Functional::OpNormInf,
        Functional::NumericalRadius,
        Functional::MaxEntry,
    ];

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            Functional::SpectralRadius => "r",
            Functional::OpNorm1 => "op1",
            Functional::OpNorm2 => "op2",
            Functional::OpNormInf => "opinf",
            Functional::NumericalRadius => "w",
            Functional::MaxEntry => "maxentry",
        }
    }

    pub fn long_name(self) -> &'static str {
        match self {
            Functional::SpectralRadius => "spectral-radius",
            Functional::OpNorm1 => "op-norm-1",
            Functional::OpNorm2 => "op-norm-2",
            Functional::OpNormInf => "op-norm-inf",
            Functional::NumericalRadius => "numerical-radius",
            Functional::MaxEntry => "max-entry",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.short_name() == s || f.long_name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown functional {s:?}")))
    }
}

/// Which induced operator norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    One,
    Two,
    Inf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14, max_iter: 100_000 }
    }
}

impl SpectralOptions {
    /// Same options with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { rtol: self.rtol / factor, atol: self.atol / factor, max_iter: self.max_iter }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidArgument("spectral tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// A value with an enclosing interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedValue {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CertifiedValue {
    pub fn exact(value: f64) -> Self {
        Self { value, lo: value, hi: value, iterations: 0, converged: true }
    }

    pub fn from_bracket(lo: f64, hi: f64, iterations: usize, converged: bool) -> Self {
        let value = (0.5 * lo + 0.5 * hi).clamp(lo, hi);
        Self { value, lo, hi, iterations, converged }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn combine(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            value: f(self.value, other.value),
            lo: f(self.lo, other.lo),
            hi: f(self.hi, other.hi),
            iterations: self.iterations + other.iterations,
            converged: self.converged && other.converged,
        }
    }

    /// `x^e` for `e >= 0`, which is monotone on the nonnegative reals.
    pub fn powf(self, e: f64) -> Self {
        debug_assert!(e >= 0.0);
        Self { value: self.value.powf(e), lo: self.lo.powf(e), hi: self.hi.powf(e), ..self }
    }

    pub fn sqrt(self) -> Self {
        Self { value: self.value.sqrt(), lo: self.lo.sqrt(), hi: self.hi.sqrt(), ..self }
    }

    /// Multiplication by `c >= 0`.
    pub fn scale(self, c: f64) -> Self {
        Self { value: self.value * c, lo: self.lo * c, hi: self.hi * c, ..self }
    }

    pub fn min(self, other: Self) -> Self {
        self.combine(other, f64::min)
    }
}

impl std::ops::Mul for CertifiedValue {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        self.combine(other, |a, b| a * b)
    }
}

impl std::ops::Add for CertifiedValue {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        self.combine(other, |a, b| a + b)
    }
}

/// Certified spectral radius. Returns [`Error::NotConverged`] carrying the
/// best bracket when the tolerance is not met.
pub fn spectral_radius(a: &NonnegMatrix, opts: &SpectralOptions) -> Result<CertifiedValue> {
    opts.validate()?;
    let cv = radius_bracket(a, opts);
    if cv.converged {
        Ok(cv)
    } else {
        Err(Error::NotConverged { best: cv })
    }
}

/// Like [`spectral_radius`] but returns the best bracket even when it did
/// not converge; the bracket is valid either way.
pub fn certified_radius(a: &NonnegMatrix, opts: &SpectralOptions) -> CertifiedValue {
    radius_bracket(a, opts)
}

fn radius_bracket(a: &NonnegMatrix, opts: &SpectralOptions) -> CertifiedValue {
    let n = a.dim();
    if n == 1 {
        return CertifiedValue::exact(a.get(0, 0));
    }
    let components = strong_components(a);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut iterations = 0;
    let mut converged = true;
    for comp in components {
        if comp.len() == 1 {
            let d = a.get(comp[0], comp[0]);
            lo = lo.max(d);
            hi = hi.max(d);
            continue;
        }
        let k = comp.len();
        let mut block = Vec::with_capacity(k * k);
        for &i in &comp {
            for &j in &comp {
                block.push(a.get(i, j));
            }
        }
        let b = irreducible_bracket(&block, k, opts);
        lo = lo.max(b.lo);
        hi = hi.max(b.hi);
        iterations += b.iterations;
        converged &= b.converged;
    }
    // The max over blocks can converge even if a dominated block did not.
    if !converged && hi - lo <= f64::max(opts.rtol * lo, opts.atol) {
        converged = true;
    }
    CertifiedValue::from_bracket(lo, hi, iterations, converged)
}

/// Strongly connected components of the support graph, as sorted index lists.
fn strong_components(a: &NonnegMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    if a.as_slice().iter().all(|&v| v > 0.0) {
        return vec![(0..n).collect()];
    }
    let mut g = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && a.get(i, j) > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

struct BlockBracket {
    lo: f64,
    hi: f64,
    iterations: usize,
    converged: bool,
}

/// Iterations allowed without tightening the bracket before giving up.
const STALL_LIMIT: usize = 50;

fn irreducible_bracket(b: &[f64], k: usize, opts: &SpectralOptions) -> BlockBracket {
    // Quotients are sums of k nonnegative products; this pad covers their
    // rounding so the padded bracket encloses the exact quotient bracket.
    let pad = 4.0 * (k as f64 + 2.0) * f64::EPSILON;
    let mut x = vec![1.0; k];
    let mut y = vec![0.0; k];
    let (mut best_lo, mut best_hi) = (0.0f64, f64::INFINITY);
    let mut stall = 0;
    let mut iterations = 0;
    loop {
        matvec(b, &x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (yi, xi) in y.iter().zip(&x) {
            let q = yi / xi;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let lo_p = lo * (1.0 - pad);
        let hi_p = hi * (1.0 + pad) + f64::MIN_POSITIVE;
        let improved = lo_p > best_lo || hi_p < best_hi;
        best_lo = best_lo.max(lo_p);
        best_hi = best_hi.min(hi_p);
        if best_hi - best_lo <= f64::max(opts.rtol * best_lo, opts.atol) {
            return BlockBracket { lo: best_lo, hi: best_hi, iterations, converged: true };
        }
        stall = if improved { 0 } else { stall + 1 };
        if iterations >= opts.max_iter || stall >= STALL_LIMIT {
            return BlockBracket { lo: best_lo, hi: best_hi, iterations, converged: false };
        }
        iterations += 1;
        if hi > lo {
            if let Some(z) = shifted_inverse_step(b, k, hi, &x) {
                x = z;
                continue;
            }
        }
        // (B + hi I) x keeps x strictly positive.
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi + hi * *xi;
        }
        normalize_max(&mut x);
    }
}

fn matvec(b: &[f64], x: &[f64], y: &mut [f64]) {
    let k = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = b[i * k..(i + 1) * k].iter().zip(x).map(|(a, v)| a * v).sum();
    }
}

fn normalize_max(x: &mut [f64]) {
    let m = x.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v /= m);
    }
}

/// Solves `(mu I - B) z = x`. For `mu > r(B)` the inverse is entrywise
/// positive on an irreducible block, so a usable step is strictly positive.
fn shifted_inverse_step(b: &[f64], k: usize, mu: f64, x: &[f64]) -> Option<Vec<f64>> {
    let m = DMatrix::from_fn(k, k, |i, j| if i == j { mu - b[i * k + j] } else { -b[i * k + j] });
    let z = m.lu().solve(&DVector::from_column_slice(x))?;
    let mut z: Vec<f64> = z.iter().copied().collect();
    if z.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    normalize_max(&mut z);
    if z.iter().any(|v| *v <= 0.0) {
        return None;
    }
    Some(z)
}

/// Induced operator norm on ℓ1, ℓ2 or ℓ∞.
pub fn op_norm(a: &NonnegMatrix, p: NormKind) -> Result<f64> {
    match p {
        NormKind::One => Ok(a.max_col_sum()),
        NormKind::Inf => Ok(a.max_row_sum()),
        NormKind::Two => Ok(op_norm2_certified(a, &SpectralOptions::default())?.value),
    }
}

/// `‖A‖₂ = r(AᵀA)^{1/2}` with the bracket carried through the square root.
pub fn op_norm2_certified(a: &NonnegMatrix, opts: &SpectralOptions) -> Result<CertifiedValue> {
    let gram = a.transpose().matmul(a)?;
    Ok(spectral_radius(&gram, opts)?.sqrt())
}

/// Numerical radius of a nonnegative matrix: the Perron root of its
/// symmetric part.
pub fn numerical_radius(a: &NonnegMatrix) -> Result<f64> {
    Ok(spectral_radius(&a.symmetric_part(), &SpectralOptions::default())?.value)
}

/// Evaluates `f(A)` with default tolerances; non-convergence is an error.
pub fn evaluate(f: Functional, a: &NonnegMatrix) -> Result<f64> {
    let opts = SpectralOptions::default();
    let cv = evaluate_certified(f, a, &opts)?;
    if !cv.converged {
        return Err(Error::NotConverged { best: cv });
    }
    Ok(cv.value)
}

/// Evaluates `f(A)` as a certified value. Non-convergence is reported
/// through `converged = false` rather than an error.
pub fn evaluate_certified(f: Functional, a: &NonnegMatrix, opts: &SpectralOptions) -> Result<CertifiedValue> {
    opts.validate()?;
    Ok(match f {
        Functional::SpectralRadius => certified_radius(a, opts),
        Functional::OpNorm1 => CertifiedValue::exact(a.max_col_sum()),
        Functional::OpNormInf => CertifiedValue::exact(a.max_row_sum()),
        Functional::MaxEntry => CertifiedValue::exact(a.max_entry()),
        Functional::OpNorm2 => certified_radius(&a.transpose().matmul(a)?, opts).sqrt(),
        Functional::NumericalRadius => certified_radius(&a.symmetric_part(), opts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Permutation;

    fn m(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(rows).unwrap()
    }

    fn opts() -> SpectralOptions {
        SpectralOptions::default()
    }

    // Closed forms from the 2×2 characteristic polynomial.
    const R_1234: f64 = 5.372281323269014; // (5 + √33) / 2
    const OP2_1234: f64 = 5.464985704219043; // sqrt((30 + √884) / 2)
    const W_1234: f64 = 5.415_475_947_422_65; // (5 + √34) / 2

    #[test]
    fn closed_form_constants() {
        assert!((R_1234 - (5.0 + 33f64.sqrt()) / 2.0).abs() < 1e-14);
        assert!((OP2_1234 - ((30.0 + 884f64.sqrt()) / 2.0).sqrt()).abs() < 1e-14);
        assert!((W_1234 - (5.0 + 34f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_radius_examples() {
        let r = spectral_radius(&NonnegMatrix::identity(3), &opts()).unwrap();
        assert!(r.lo <= 1.0 && 1.0 <= r.hi);
        let r = spectral_radius(&m(&[&[0.0, 1.0], &[0.0, 0.0]]), &opts()).unwrap();
        assert_eq!((r.lo, r.hi), (0.0, 0.0));
        let r = spectral_radius(&m(&[&[1.0, 2.0], &[3.0, 4.0]]), &opts()).unwrap();
        assert!(r.lo <= R_1234 && R_1234 <= r.hi, "{r:?}");
        assert!(r.width() <= 1e-10 * r.value);
    }

    #[test]
    fn reducible_and_periodic_inputs() {
        // Block upper-triangular: r = max of diagonal block radii.
        let a = m(&[&[1.0, 5.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 3.0, 0.0]]);
        let r = spectral_radius(&a, &opts()).unwrap();
        assert!((r.value - 6f64.sqrt()).abs() < 1e-12, "{r:?}");
        // Period 3 cycle.
        let p = NonnegMatrix::permutation(&Permutation::new(vec![1, 2, 0]).unwrap());
        let r = spectral_radius(&p.scale(2.0).unwrap(), &opts()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        // Jordan-like block.
        let j = m(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert!((spectral_radius(&j, &opts()).unwrap().value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nearly_decoupled_block_converges() {
        let a = m(&[&[1.0, 1e-9], &[1e-9, 1.0 - 1e-7]]);
        let r = spectral_radius(&a, &opts()).unwrap();
        assert!(r.width() <= 1e-10 * r.hi);
        let disc = (1e-7f64 * 1e-7 + 4.0 * 1e-18).sqrt();
        let exact = (2.0 - 1e-7 + disc) / 2.0;
        assert!(r.lo <= exact * (1.0 + 1e-15) && exact <= r.hi * (1.0 + 1e-15));
    }

    #[test]
    fn op_norm_examples() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(op_norm(&a, NormKind::One).unwrap(), 6.0);
        assert_eq!(op_norm(&a, NormKind::Inf).unwrap(), 7.0);
        assert!((op_norm(&a, NormKind::Two).unwrap() - OP2_1234).abs() < 1e-12);
    }

    #[test]
    fn numerical_radius_examples() {
        assert!((numerical_radius(&m(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap() - 0.5).abs() < 1e-15);
        assert!((numerical_radius(&m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap() - 3.0).abs() < 1e-14);
        assert!((numerical_radius(&m(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap() - W_1234).abs() < 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(Functional::MaxEntry, &m(&[&[1.0, 5.0], &[0.0, 2.0]])).unwrap(), 5.0);
        assert!((evaluate(Functional::SpectralRadius, &NonnegMatrix::identity(2)).unwrap() - 1.0).abs() < 1e-15);
        assert!((evaluate(Functional::OpNorm2, &NonnegMatrix::ones(3)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn functional_names_round_trip() {
        for f in Functional::ALL {
            assert_eq!(f.short_name().parse::<Functional>().unwrap(), f);
            assert_eq!(f.long_name().parse::<Functional>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.long_name()));
        }
        assert!("rho".parse::<Functional>().is_err());
    }

    #[test]
    fn rejects_bad_options() {
        let bad = SpectralOptions { rtol: 0.0, ..opts() };
        assert!(matches!(spectral_radius(&NonnegMatrix::identity(2), &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unattainable_tolerance_is_soft() {
        let tight = SpectralOptions { rtol: 1e-30, atol: 1e-300, max_iter: 1000 };
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        match spectral_radius(&a, &tight) {
            Err(Error::NotConverged { best }) => {
                assert!(!best.converged);
                assert!(best.lo <= R_1234 && R_1234 <= best.hi);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
        let soft = certified_radius(&a, &tight);
        assert!(!soft.converged && soft.lo <= R_1234 && R_1234 <= soft.hi);
    }
}
