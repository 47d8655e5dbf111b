//! Derived matrices: Hadamard weighted geometric means, C-matrices, weighted
//! geometric symmetrizations, grid bundles, dyadic refinement sequences,
//! α-profiles and the pair/cyclic product families used by the norm bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, NonnegMatrix, Permutation, Weights, WEIGHT_SUM_TOL};
use crate::spectral::{self, CertifiedValue, Functional, SpectralOptions};

fn check_same_dim(ks: &[NonnegMatrix]) -> Result<usize> {
    let first = ks.first().ok_or(Error::EmptyList)?;
    let n = first.dim();
    for k in ks {
        if k.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: k.dim() });
        }
    }
    Ok(n)
}

/// `K_1^{(α_1)} ∘ ⋯ ∘ K_n^{(α_n)}`. Factors with `α_i = 0` are dropped.
pub fn weighted_gmean(ks: &[NonnegMatrix], w: &Weights) -> Result<NonnegMatrix> {
    let n = check_same_dim(ks)?;
    if ks.len() != w.len() {
        return Err(Error::LengthMismatch { left: ks.len(), right: w.len() });
    }
    if w.sum() <= 0.0 {
        return Err(Error::InvalidWeights("weights sum to zero".into()));
    }
    let mut acc: Option<NonnegMatrix> = None;
    for (k, &a) in ks.iter().zip(w.alphas()) {
        if a == 0.0 {
            continue;
        }
        let p = k.hadamard_power(a)?;
        acc = Some(match acc {
            None => p,
            Some(m) => m.hadamard_product(&p)?,
        });
    }
    Ok(acc.unwrap_or_else(|| NonnegMatrix::ones(n)))
}

/// The C-matrix: off-diagonal entries are the weighted geometric mean of
/// the `K_i`, diagonal entries their weighted arithmetic mean.
pub fn c_matrix(ks: &[NonnegMatrix], w: &Weights) -> Result<NonnegMatrix> {
    if !w.is_convex() {
        return Err(Error::WeightsNotConvex(w.sum()));
    }
    let g = weighted_gmean(ks, w)?;
    let n = g.dim();
    let mut data = g.as_slice().to_vec();
    for i in 0..n {
        data[i * n + i] = ks.iter().zip(w.alphas()).map(|(k, a)| a * k.get(i, i)).sum();
    }
    NonnegMatrix::from_vec(n, data)
}

/// `S_{α,β}(K) = K^{(α)} ∘ (Kᵀ)^{(β)}`, defined for `α, β >= 0` with
/// `α + β >= 1`. `S_α(K)` is the call with `β = 1 - α`.
pub fn sym(k: &NonnegMatrix, alpha: f64, beta: f64) -> Result<NonnegMatrix> {
    let ok = alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0;
    if !ok || alpha + beta < 1.0 - WEIGHT_SUM_TOL {
        return Err(Error::ExponentDomain { alpha, beta });
    }
    k.hadamard_power(alpha)?.hadamard_product(&k.transpose().hadamard_power(beta)?)
}

/// `S_α(K)` for `α ∈ [0, 1]`.
pub fn sym_alpha(k: &NonnegMatrix, alpha: f64) -> Result<NonnegMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ExponentDomain { alpha, beta: 1.0 - alpha });
    }
    sym(k, alpha, 1.0 - alpha)
}

/// The geometric symmetrization `S(K)` with entries `sqrt(k(i,j) k(j,i))`.
pub fn geometric_symmetrization(k: &NonnegMatrix) -> Result<NonnegMatrix> {
    sym(k, 0.5, 0.5)
}

/// Everything derived from an `l × n` grid of matrices `K_{ki}` and weights
/// with `s_n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBundle {
    /// Product over grid rows of each row's weighted geometric mean.
    pub h: NonnegMatrix,
    /// Column products `H_i = K_{1i} ⋯ K_{li}`.
    pub h_list: Vec<NonnegMatrix>,
    /// `max_i max_entry(H_i)`.
    pub m: f64,
    /// `M^{s_n - 1}`.
    pub beta: f64,
    pub weights: Weights,
    /// `max(M^{s_n}, 1)`.
    pub delta: f64,
}

pub fn grid_bundle(grid: &[Vec<NonnegMatrix>], w: &Weights) -> Result<GridBundle> {
    if grid.is_empty() {
        return Err(Error::EmptyList);
    }
    if !w.is_super_unit() {
        return Err(Error::WeightsTooSmall(w.sum()));
    }
    let n = w.len();
    for row in grid {
        if row.len() != n {
            return Err(Error::LengthMismatch { left: row.len(), right: n });
        }
    }
    check_same_dim(&grid.iter().flatten().cloned().collect::<Vec<_>>())?;
    let row_means = grid.iter().map(|row| weighted_gmean(row, w)).collect::<Result<Vec<_>>>()?;
    let h = matrix::product(&row_means)?;
    let h_list = (0..n).map(|i| matrix::product(grid.iter().map(|row| &row[i]))).collect::<Result<Vec<_>>>()?;
    let m = h_list.iter().map(NonnegMatrix::max_entry).fold(0.0, f64::max);
    let beta = m.powf(w.beta_scale_exponent());
    let delta = m.powf(w.sum()).max(1.0);
    Ok(GridBundle { h, h_list, m, beta, weights: w.clone(), delta })
}

/// `ρ_n = r(S_{α,β}(K^{2^n}))^{2^{-n}}` for `n = 0..=depth` with its cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementSequence {
    pub values: Vec<f64>,
    pub brackets: Vec<CertifiedValue>,
    pub cap: f64,
    pub cap_bracket: CertifiedValue,
    pub functional: Functional,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub depth: usize,
}

/// Largest supported depth; `2^depth` must stay exactly representable.
pub const MAX_DEPTH: usize = 52;

/// Dyadic refinement sequence. Without `beta` the symmetrization is `S_α`
/// and the cap is `r(K)`; with `beta` it is `S_{α,β}` and the cap is
/// `min(r(K)^{α+β}, ‖K^{2^depth}‖∞^{(α+β-1)/2^depth} r(K))`.
///
/// Dyadic powers are renormalized by their max entry after every squaring
/// and the scale is carried in log form, using homogeneity of the radius.
pub fn refinement_sequence(
    k: &NonnegMatrix,
    alpha: f64,
    beta: Option<f64>,
    depth: usize,
    f: Functional,
    opts: &SpectralOptions,
) -> Result<RefinementSequence> {
    if f != Functional::SpectralRadius {
        return Err(Error::UnsupportedFunctional(f.long_name().into()));
    }
    if depth > MAX_DEPTH {
        return Err(Error::DepthOverflow(depth));
    }
    let b = match beta {
        None => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::ExponentDomain { alpha, beta: 1.0 - alpha });
            }
            1.0 - alpha
        }
        Some(b) => b,
    };
    // Validates the exponent pair.
    sym(&NonnegMatrix::ones(1), alpha, b)?;
    let s = alpha + b;

    let (mut p, mut log_scale) = normalized(k.clone(), 0.0)?;
    let mut values = Vec::with_capacity(depth + 1);
    let mut brackets = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        if level > 0 {
            let sq = p.matmul(&p)?;
            (p, log_scale) = normalized(sq, 2.0 * log_scale)?;
        }
        let root = 0.5f64.powi(level as i32);
        let r = spectral::certified_radius(&sym(&p, alpha, b)?, opts);
        let term = r.powf(root).scale((s * log_scale * root).exp());
        values.push(term.value);
        brackets.push(term);
    }

    let rk = spectral::certified_radius(k, opts);
    let cap_bracket = if beta.is_none() {
        rk
    } else {
        let root = 0.5f64.powi(depth as i32);
        // ‖K^{2^depth}‖∞ = e^{log_scale} · max_entry(p), and max_entry(p) is 0 or 1.
        let norm_factor = if p.max_entry() > 0.0 { ((s - 1.0) * log_scale * root).exp() } else { 0.0f64.powf(s - 1.0) };
        rk.powf(s).min(rk.scale(norm_factor))
    };
    Ok(RefinementSequence { values, brackets, cap: cap_bracket.value, cap_bracket, functional: f, alpha, beta, depth })
}

/// Divides by the max entry (when positive) and adds its log to `log_scale`.
fn normalized(m: NonnegMatrix, log_scale: f64) -> Result<(NonnegMatrix, f64)> {
    let c = m.max_entry();
    if c > 0.0 {
        Ok((m.scale(1.0 / c)?, log_scale + c.ln()))
    } else {
        Ok((m, log_scale))
    }
}

/// Samples `f(S_α(K))` on a uniform grid over `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub brackets: Vec<CertifiedValue>,
    pub functional: Functional,
}

pub fn alpha_profile(k: &NonnegMatrix, f: Functional, gridsize: usize, opts: &SpectralOptions) -> Result<AlphaProfile> {
    if gridsize < 3 || gridsize.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("grid size {gridsize} must be odd and at least 3")));
    }
    if !matches!(f, Functional::SpectralRadius | Functional::OpNorm2 | Functional::NumericalRadius) {
        return Err(Error::UnsupportedFunctional(f.long_name().into()));
    }
    let last = (gridsize - 1) as f64;
    let grid: Vec<f64> = (0..gridsize).map(|i| i as f64 / last).collect();
    let brackets = grid
        .iter()
        .map(|&a| spectral::evaluate_certified(f, &sym(k, a, 1.0 - a)?, opts))
        .collect::<Result<Vec<_>>>()?;
    let values = brackets.iter().map(|b| b.value).collect();
    Ok(AlphaProfile { grid, values, brackets, functional: f })
}

/// Which pair family to build from `H_1, .., H_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    /// `A_j = H*_{τ(2j-1)} H_{τ(2j)}`, `A_{m/2+j} = A_j*`.
    A,
    /// `B_j = H_{τ(2j-1)} H*_{τ(2j)}`, `B_{m/2+j} = B_j*`.
    B,
    /// `Q_j`: the cyclic product of `H*_{τ(k)} H_{ν(k)}` starting at `k = j`.
    Q,
}

pub fn pair_family(
    hs: &[NonnegMatrix],
    tau: &Permutation,
    nu: Option<&Permutation>,
    kind: PairKind,
) -> Result<Vec<NonnegMatrix>> {
    check_same_dim(hs)?;
    let m = hs.len();
    if tau.len() != m {
        return Err(Error::LengthMismatch { left: tau.len(), right: m });
    }
    match kind {
        PairKind::A | PairKind::B => {
            if m % 2 == 1 {
                return Err(Error::OddM(m));
            }
            if nu.is_some() {
                return Err(Error::InvalidArgument("pair families A and B take a single permutation".into()));
            }
            let half: Vec<NonnegMatrix> = (0..m / 2)
                .map(|j| {
                    let (x, y) = (&hs[tau.apply(2 * j)], &hs[tau.apply(2 * j + 1)]);
                    match kind {
                        PairKind::A => x.transpose().matmul(y),
                        _ => x.matmul(&y.transpose()),
                    }
                })
                .collect::<Result<_>>()?;
            let adjoints: Vec<NonnegMatrix> = half.iter().map(NonnegMatrix::transpose).collect();
            Ok(half.into_iter().chain(adjoints).collect())
        }
        PairKind::Q => {
            let nu = nu.ok_or(Error::MissingPermutation)?;
            if nu.len() != m {
                return Err(Error::LengthMismatch { left: nu.len(), right: m });
            }
            let pairs =
                (0..m).map(|k| hs[tau.apply(k)].transpose().matmul(&hs[nu.apply(k)])).collect::<Result<Vec<_>>>()?;
            cyclic_products(&pairs, None)
        }
    }
}

/// The rotations `X_i ⋯ X_k X_1 ⋯ X_{i-1}` of the sequence
/// `X_j = A_{ν(j)}` (identity order when `nu` is `None`).
pub fn cyclic_products(mats: &[NonnegMatrix], nu: Option<&Permutation>) -> Result<Vec<NonnegMatrix>> {
    check_same_dim(mats)?;
    let k = mats.len();
    let order: Vec<usize> = match nu {
        Some(p) if p.len() != k => return Err(Error::LengthMismatch { left: p.len(), right: k }),
        Some(p) => p.image().to_vec(),
        None => (0..k).collect(),
    };
    (0..k).map(|i| matrix::product((0..k).map(|t| &mats[order[(i + t) % k]]))).collect()
}

/// The permutations `(τ, ν)` pairing `H_1, .., H_m` for odd `m` as
/// `(1,2), (3,4), .., (m-2,m-1), (m,1), (2,3), .., (m-1,m)`.
pub fn odd_pairing(m: usize) -> Result<(Permutation, Permutation)> {
    if m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("odd pairing needs odd m, got {m}")));
    }
    let half_up = m.div_ceil(2);
    let half_down = (m - 1) / 2;
    let tau = (0..m).map(|j| if j < half_up { 2 * j } else { 2 * (j + 1 - half_up) - 1 }).collect();
    let nu = (0..m).map(|j| if j < half_down { 2 * j + 1 } else { 2 * (j + 1 - half_down) - 2 }).collect();
    Ok((Permutation::new(tau)?, Permutation::new(nu)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(rows).unwrap()
    }

    fn close(a: &NonnegMatrix, b: &NonnegMatrix, tol: f64) -> bool {
        a.dim() == b.dim() && a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    fn cycle3() -> NonnegMatrix {
        NonnegMatrix::permutation(&Permutation::new(vec![1, 2, 0]).unwrap())
    }

    fn half() -> Weights {
        Weights::new(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn weighted_gmean_examples() {
        let k1 = m(&[&[1.0, 4.0], &[9.0, 16.0]]);
        let k2 = m(&[&[4.0, 1.0], &[1.0, 4.0]]);
        assert!(close(&weighted_gmean(&[k1.clone(), k2], &half()).unwrap(), &m(&[&[2.0, 2.0], &[3.0, 8.0]]), 1e-15));
        assert_eq!(weighted_gmean(std::slice::from_ref(&k1), &Weights::new(vec![1.0]).unwrap()).unwrap(), k1);
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = m(&[&[4.0, 3.0], &[2.0, 1.0]]);
        let s6 = 6f64.sqrt();
        assert!(close(&weighted_gmean(&[a, b], &half()).unwrap(), &m(&[&[2.0, s6], &[s6, 2.0]]), 1e-15));
        assert_eq!(weighted_gmean(&[], &Weights::uniform(1)), Err(Error::EmptyList));
    }

    #[test]
    fn zero_weight_factor_is_dropped() {
        let k1 = m(&[&[0.0, 2.0], &[3.0, 0.0]]);
        let k2 = m(&[&[5.0, 1.0], &[1.0, 7.0]]);
        let g = weighted_gmean(&[k1, k2.clone()], &Weights::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert_eq!(g, k2);
    }

    #[test]
    fn c_matrix_examples() {
        let k1 = m(&[&[1.0, 4.0], &[9.0, 1.0]]);
        let k2 = m(&[&[4.0, 1.0], &[1.0, 3.0]]);
        assert!(close(&c_matrix(&[k1.clone(), k2], &half()).unwrap(), &m(&[&[2.5, 2.0], &[3.0, 2.0]]), 1e-15));
        assert_eq!(c_matrix(std::slice::from_ref(&k1), &Weights::new(vec![1.0]).unwrap()).unwrap(), k1);
        let d1 = NonnegMatrix::diagonal(&[2.0, 4.0]).unwrap();
        let d2 = NonnegMatrix::diagonal(&[6.0, 0.0]).unwrap();
        assert_eq!(c_matrix(&[d1, d2], &half()).unwrap(), NonnegMatrix::diagonal(&[4.0, 2.0]).unwrap());
        assert_eq!(c_matrix(&[k1], &Weights::new(vec![2.0]).unwrap()), Err(Error::WeightsNotConvex(2.0)));
    }

    #[test]
    fn sym_examples() {
        let k = m(&[&[1.0, 2.0], &[8.0, 4.0]]);
        assert!(close(&sym(&k, 0.5, 0.5).unwrap(), &m(&[&[1.0, 4.0], &[4.0, 4.0]]), 1e-15));
        let s = m(&[&[1.0, 3.0], &[3.0, 2.0]]);
        assert!(close(&sym_alpha(&s, 0.3).unwrap(), &s, 1e-15));
        assert_eq!(sym(&k, 1.0, 1.0).unwrap(), m(&[&[1.0, 16.0], &[16.0, 16.0]]));
        assert_eq!(sym(&k, 0.2, 0.3), Err(Error::ExponentDomain { alpha: 0.2, beta: 0.3 }));
        assert!(sym_alpha(&k, 1.5).is_err());
    }

    #[test]
    fn sym_adjoint_identity() {
        let k = m(&[&[0.3, 2.0, 0.0], &[8.0, 4.0, 1.5], &[0.7, 0.0, 2.5]]);
        for a in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let lhs = sym_alpha(&k, a).unwrap().transpose();
            assert!(close(&lhs, &sym(&k, 1.0 - a, a).unwrap(), 1e-15));
            assert!(close(&lhs, &sym_alpha(&k.transpose(), a).unwrap(), 1e-15));
        }
    }

    #[test]
    fn grid_bundle_examples() {
        let k11 = NonnegMatrix::diagonal(&[2.0, 2.0]).unwrap();
        let k12 = NonnegMatrix::diagonal(&[3.0, 3.0]).unwrap();
        let g = grid_bundle(&[vec![k11.clone(), k12.clone()]], &Weights::new(vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(g.h, NonnegMatrix::diagonal(&[6.0, 6.0]).unwrap());
        assert_eq!((g.m, g.beta, g.delta), (3.0, 3.0, 9.0));
        assert_eq!(g.weights.betas(), &[0.5, 0.5]);

        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = m(&[&[4.0, 3.0], &[2.0, 1.0]]);
        let g = grid_bundle(&[vec![a.clone(), b.clone()]], &half()).unwrap();
        assert_eq!(g.h, weighted_gmean(&[a.clone(), b.clone()], &half()).unwrap());
        assert_eq!(g.beta, 1.0);

        let g = grid_bundle(&[vec![a.clone()], vec![b.clone()]], &Weights::new(vec![1.0]).unwrap()).unwrap();
        assert_eq!(g.h, a.matmul(&b).unwrap());
        assert_eq!(g.h_list, vec![a.matmul(&b).unwrap()]);

        assert_eq!(grid_bundle(&[vec![a]], &Weights::new(vec![0.5]).unwrap()), Err(Error::WeightsTooSmall(0.5)));
    }

    #[test]
    fn refinement_sequence_examples() {
        let opts = SpectralOptions::default();
        let seq = refinement_sequence(&cycle3(), 0.5, None, 3, Functional::SpectralRadius, &opts).unwrap();
        assert_eq!(seq.values, vec![0.0; 4]);
        assert!((seq.cap - 1.0).abs() < 1e-12);

        let k = m(&[&[0.0, 4.0], &[1.0, 0.0]]);
        let seq = refinement_sequence(&k, 0.5, None, 2, Functional::SpectralRadius, &opts).unwrap();
        for v in &seq.values {
            assert!((v - 2.0).abs() < 1e-12, "{seq:?}");
        }
        assert!((seq.cap - 2.0).abs() < 1e-12);

        let r = (5.0 + 33f64.sqrt()) / 2.0;
        let k = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let seq = refinement_sequence(&k, 0.5, None, 1, Functional::SpectralRadius, &opts).unwrap();
        assert_eq!(seq.values.len(), 2);
        for v in &seq.values {
            assert!((v - r).abs() < 1e-10 * r);
        }
    }

    #[test]
    fn refinement_sequence_rejects_bad_input() {
        let opts = SpectralOptions::default();
        let k = NonnegMatrix::identity(2);
        assert!(matches!(
            refinement_sequence(&k, 0.5, None, 2, Functional::OpNorm2, &opts),
            Err(Error::UnsupportedFunctional(_))
        ));
        assert!(matches!(
            refinement_sequence(&k, 1.5, None, 2, Functional::SpectralRadius, &opts),
            Err(Error::ExponentDomain { .. })
        ));
        assert_eq!(
            refinement_sequence(&k, 0.5, None, 100, Functional::SpectralRadius, &opts),
            Err(Error::DepthOverflow(100))
        );
    }

    #[test]
    fn refinement_survives_large_depth() {
        let k = m(&[&[1e6, 3e5], &[2e6, 7e5]]);
        let opts = SpectralOptions::default();
        let seq = refinement_sequence(&k, 0.3, Some(1.4), 8, Functional::SpectralRadius, &opts).unwrap();
        assert!(seq.values.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(seq.cap.is_finite());
    }

    #[test]
    fn alpha_profile_examples() {
        let opts = SpectralOptions::default();
        let s = m(&[&[1.0, 3.0], &[3.0, 2.0]]);
        let p = alpha_profile(&s, Functional::SpectralRadius, 5, &opts).unwrap();
        let r = spectral::evaluate(Functional::SpectralRadius, &s).unwrap();
        assert!(p.values.iter().all(|v| (v - r).abs() < 1e-10 * r));

        let p = alpha_profile(&cycle3(), Functional::SpectralRadius, 5, &opts).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0, 1.0];
        for (v, e) in p.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12, "{p:?}");
        }

        let k = m(&[&[1.0, 2.0], &[8.0, 4.0]]);
        let p = alpha_profile(&k, Functional::SpectralRadius, 3, &opts).unwrap();
        let r = (5.0 + 73f64.sqrt()) / 2.0;
        for v in &p.values {
            assert!((v - r).abs() < 1e-10 * r, "{p:?}");
        }

        assert!(alpha_profile(&k, Functional::SpectralRadius, 4, &opts).is_err());
        assert!(alpha_profile(&k, Functional::OpNorm1, 3, &opts).is_err());
    }

    #[test]
    fn pair_family_examples() {
        let h1 = m(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let h2 = m(&[&[0.5, 0.0], &[4.0, 1.0]]);
        let hs = [h1.clone(), h2.clone()];
        let id = Permutation::identity(2);
        let a = pair_family(&hs, &id, None, PairKind::A).unwrap();
        assert_eq!(a, vec![h1.transpose().matmul(&h2).unwrap(), h2.transpose().matmul(&h1).unwrap()]);
        let b = pair_family(&hs, &id, None, PairKind::B).unwrap();
        assert_eq!(b, vec![h1.matmul(&h2.transpose()).unwrap(), h2.matmul(&h1.transpose()).unwrap()]);
        let q = pair_family(&hs, &id, Some(&id), PairKind::Q).unwrap();
        let g1 = h1.transpose().matmul(&h1).unwrap();
        let g2 = h2.transpose().matmul(&h2).unwrap();
        assert_eq!(q, vec![g1.matmul(&g2).unwrap(), g2.matmul(&g1).unwrap()]);

        let odd = [h1.clone(), h2.clone(), h1.clone()];
        assert_eq!(pair_family(&odd, &Permutation::identity(3), None, PairKind::A), Err(Error::OddM(3)));
        assert_eq!(pair_family(&hs, &id, None, PairKind::Q), Err(Error::MissingPermutation));
    }

    #[test]
    fn cyclic_products_examples() {
        let a1 = m(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let a2 = m(&[&[0.5, 0.0], &[4.0, 1.0]]);
        assert_eq!(cyclic_products(std::slice::from_ref(&a1), None).unwrap(), vec![a1.clone()]);
        assert_eq!(
            cyclic_products(&[a1.clone(), a2.clone()], None).unwrap(),
            vec![a1.matmul(&a2).unwrap(), a2.matmul(&a1).unwrap()]
        );
        let id = NonnegMatrix::identity(3);
        assert_eq!(cyclic_products(&vec![id.clone(); 4], None).unwrap(), vec![id; 4]);
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(
            cyclic_products(&[a1.clone(), a2.clone()], Some(&swap)).unwrap(),
            vec![a2.matmul(&a1).unwrap(), a1.matmul(&a2).unwrap()]
        );
    }

    #[test]
    fn odd_pairing_examples() {
        let (tau, nu) = odd_pairing(3).unwrap();
        assert_eq!(tau.one_based(), vec![1, 3, 2]);
        assert_eq!(nu.one_based(), vec![2, 1, 3]);
        let (tau, nu) = odd_pairing(5).unwrap();
        let pairs: Vec<_> = tau.one_based().into_iter().zip(nu.one_based()).collect();
        assert_eq!(pairs, vec![(1, 2), (3, 4), (5, 1), (2, 3), (4, 5)]);
        let (tau, nu) = odd_pairing(1).unwrap();
        assert!(tau.is_identity() && nu.is_identity());
        assert!(odd_pairing(4).is_err());
    }
}
