use super::{
    AlphaDomain, BetaDomain, Chain, Ctx, ExponentRule, Filter, InputShape, LawSpec, Matrices, Mode, Parity, PermRule,
    WeightRule,
};
use crate::constructions::{
    self, c_matrix, cyclic_products, odd_pairing, pair_family, sym, sym_alpha, weighted_gmean, PairKind,
};
use crate::error::Result;
use crate::matrix::{self, NonnegMatrix, Weights};
use crate::spectral::{CertifiedValue, Functional};

use Functional::{NumericalRadius as W, OpNorm1 as OP1, OpNorm2 as OP2, OpNormInf as OPINF, SpectralRadius as R};

const R_ONLY: &[Functional] = &[R];
const R_NORMS: &[Functional] = &[R, OP1, OP2, OPINF];
const R_NORMS_W: &[Functional] = &[R, OP1, OP2, OPINF, W];
const NORMS: &[Functional] = &[OP1, OP2, OPINF];
const NORMS_W: &[Functional] = &[OP1, OP2, OPINF, W];
const L2_FAMILY: &[Functional] = &[R, OP2, W];
const R_OP2: &[Functional] = &[R, OP2];
const OP2_ONLY: &[Functional] = &[OP2];

const fn exps(alpha: AlphaDomain, beta: BetaDomain) -> ExponentRule {
    ExponentRule { alpha, beta, ..ExponentRule::NONE }
}

const ALPHA_UNIT: ExponentRule = exps(AlphaDomain::Unit, BetaDomain::None);
const ALPHA_BETA: ExponentRule = exps(AlphaDomain::Nonnegative, BetaDomain::SumAtLeastOne);

const fn shape(matrices: Matrices) -> InputShape {
    InputShape::new(matrices)
}

const fn weighted(matrices: Matrices, weights: WeightRule) -> InputShape {
    InputShape { weights, ..InputShape::new(matrices) }
}

const fn with_exps(matrices: Matrices, exponents: ExponentRule) -> InputShape {
    InputShape { exponents, ..InputShape::new(matrices) }
}

const fn family(min: usize, max: usize, parity: Parity, perms: PermRule, exponents: ExponentRule) -> InputShape {
    InputShape {
        matrices: Matrices::Family { min, max },
        parity,
        perms,
        exponents,
        weights: WeightRule::None,
        filter: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn law(
    id: &'static str,
    name: &'static str,
    statement: &'static str,
    shape: InputShape,
    functionals: &'static [Functional],
    mode: Mode,
    eval: super::EvalFn,
) -> LawSpec {
    LawSpec { id, name, statement, shape, functionals, w_needs_convex: false, mode, eval }
}

fn scalar(
    id: &'static str,
    name: &'static str,
    statement: &'static str,
    shape: InputShape,
    fs: &'static [Functional],
    eval: super::EvalFn,
) -> LawSpec {
    law(id, name, statement, shape, fs, Mode::ScalarChain, eval)
}

fn entrywise(
    id: &'static str,
    name: &'static str,
    statement: &'static str,
    shape: InputShape,
    eval: super::EvalFn,
) -> LawSpec {
    law(id, name, statement, shape, &[], Mode::Entrywise, eval)
}

/// The fixed registry of inequalities.
pub fn catalog() -> Vec<LawSpec> {
    let mut v = vec![
        LawSpec {
            w_needs_convex: true,
            ..scalar(
                "L01",
                "weighted geometric mean bound",
                "ρ(K_1^(α_1) ∘ ⋯ ∘ K_n^(α_n)) ≤ ρ(K_1)^α_1 ⋯ ρ(K_n)^α_n",
                weighted(Matrices::List, WeightRule::SuperUnit),
                R_NORMS_W,
                l01,
            )
        },
        entrywise(
            "L02",
            "grid product domination",
            "H ≤ (K_11⋯K_l1)^(α_1) ∘ ⋯ ∘ (K_1n⋯K_ln)^(α_n)",
            weighted(Matrices::Grid, WeightRule::SuperUnit),
            l02,
        ),
        LawSpec {
            w_needs_convex: true,
            ..scalar(
                "L03",
                "grid product chain",
                "ρ(H) ≤ ρ(∘_i (K_1i⋯K_li)^(α_i)) ≤ Π_i ρ(K_1i⋯K_li)^α_i",
                weighted(Matrices::Grid, WeightRule::SuperUnit),
                R_NORMS_W,
                l03,
            )
        },
        scalar("L04", "entries below the norm", "k(i,j) ≤ ‖K‖", shape(Matrices::Exactly(1)), NORMS, l04),
        entrywise(
            "L05",
            "Hadamard powers of products",
            "K_1^(t) ⋯ K_n^(t) ≤ (K_1 ⋯ K_n)^(t), t ≥ 1",
            with_exps(Matrices::List, ExponentRule { t: true, ..ExponentRule::NONE }),
            l05,
        ),
        scalar(
            "L06",
            "Hadamard powers of products, scalar form",
            "ρ(K_1^(t) ⋯ K_n^(t)) ≤ ρ(K_1 ⋯ K_n)^t, t ≥ 1",
            with_exps(Matrices::List, ExponentRule { t: true, ..ExponentRule::NONE }),
            R_NORMS,
            l06,
        ),
        entrywise(
            "L07",
            "C-matrix between the means",
            "K_1^(α_1) ∘ ⋯ ∘ K_n^(α_n) ≤ C(K_1..K_n, α) ≤ α_1 K_1 + ⋯ + α_n K_n",
            weighted(Matrices::List, WeightRule::Convex),
            l07,
        ),
        scalar(
            "L08",
            "C-matrix radius convexity",
            "r(C(K_1..K_n, α)) ≤ α_1 r(K_1) + ⋯ + α_n r(K_n)",
            weighted(Matrices::List, WeightRule::Convex),
            R_ONLY,
            l08,
        ),
        scalar(
            "L09",
            "convexity in the diagonal",
            "r(Σ α_i (K + D_i)) ≤ Σ α_i r(K + D_i)",
            weighted(Matrices::BaseWithDiagonals, WeightRule::Convex),
            R_ONLY,
            l09,
        ),
        entrywise(
            "L10",
            "sums of weighted products",
            "Σ_k F_k^(α) ∘ G_k^(β) ≤ (Σ_k F_k)^(α) ∘ (Σ_k G_k)^(β), α + β ≥ 1",
            with_exps(Matrices::Pairs, ALPHA_BETA),
            l10,
        ),
        scalar(
            "L11",
            "rescaled grid chain",
            "ρ(H) ≤ ρ(∘ H_i^(α_i)) ≤ β ρ(∘ H_i^(β_i)) ≤ β Π ρ(H_i)^β_i ≤ β Σ β_i ρ(H_i) ≤ β Σ α_i ρ(H_i)",
            weighted(Matrices::Grid, WeightRule::SuperUnit),
            R_NORMS_W,
            l11,
        ),
        scalar(
            "L12",
            "rescaled grid chain through the C-matrix",
            "ρ(H) ≤ ρ(∘ H_i^(α_i)) ≤ β ρ(∘ H_i^(β_i)) ≤ β ρ(C(H_1..H_n, β)) ≤ β Σ β_i ρ(H_i)",
            weighted(Matrices::Grid, WeightRule::SuperUnit),
            R_NORMS_W,
            l12,
        ),
        scalar(
            "L13",
            "rescaled grid norm chain",
            "d(H) ≤ d(∘ H_i^(α_i)) ≤ β d(∘ H_i^(β_i)) ≤ β d(C(H, β)) ≤ β d(Σ β_i H_i) ≤ β Σ β_i d(H_i)",
            weighted(Matrices::Grid, WeightRule::SuperUnit),
            NORMS_W,
            l13,
        ),
        scalar(
            "L14",
            "zero-diagonal mean bound",
            "r(H) ≤ r(∘ H_i^(α_i)) ≤ (m - 1) max(M^s_n, 1) when diag(∘ H_i^(α_i)) = 0",
            InputShape { filter: Some(Filter::ZeroDiagonalMean), ..weighted(Matrices::Grid, WeightRule::SuperUnit) },
            R_ONLY,
            l14,
        ),
        scalar(
            "L15",
            "product of symmetrizations",
            "ρ(S_α(K_1)⋯S_α(K_n)) ≤ ρ((K_1⋯K_n)^(α) ∘ ((K_n⋯K_1)ᵀ)^(1-α)) ≤ ρ(K_1⋯K_n)^α ρ(K_n⋯K_1)^(1-α)",
            with_exps(Matrices::List, ALPHA_UNIT),
            L2_FAMILY,
            l15,
        ),
        scalar(
            "L16",
            "sum of symmetrizations",
            "ρ(Σ S_α(K_i)) ≤ ρ(S_α(Σ K_i)) ≤ ρ(Σ K_i)",
            with_exps(Matrices::List, ALPHA_UNIT),
            L2_FAMILY,
            l16,
        ),
        scalar("L17", "symmetrization bound", "ρ(S_α(K)) ≤ ρ(K)", with_exps(Matrices::Exactly(1), ALPHA_UNIT), L2_FAMILY, l17),
        scalar(
            "L18",
            "two-factor symmetrization chain",
            "r(S_α(K_1) S_α(K_2)) ≤ r((K_1K_2)^(α) ∘ ((K_2K_1)ᵀ)^(1-α)) ≤ r(K_1K_2)",
            with_exps(Matrices::Exactly(2), ALPHA_UNIT),
            R_ONLY,
            l18,
        ),
        scalar(
            "L19",
            "product of two-exponent symmetrizations",
            "ρ(S_α,β(K_1)⋯S_α,β(K_n)) ≤ ρ((K_1⋯K_n)^(α) ∘ ((K_n⋯K_1)ᵀ)^(β)) ≤ ρ(K_1⋯K_n)^α ρ(K_n⋯K_1)^β",
            with_exps(Matrices::List, ALPHA_BETA),
            R_OP2,
            l19,
        ),
        scalar(
            "L20",
            "two-exponent symmetrization bound",
            "ρ(S_α,β(K)) ≤ ρ(K)^(α+β)",
            with_exps(Matrices::Exactly(1), ALPHA_BETA),
            R_OP2,
            l20,
        ),
        scalar(
            "L21",
            "sum of two-exponent symmetrizations",
            "ρ(Σ S_α,β(K_i)) ≤ ρ(S_α,β(Σ K_i)) ≤ ρ(Σ K_i)^(α+β)",
            with_exps(Matrices::List, ALPHA_BETA),
            R_OP2,
            l21,
        ),
        scalar(
            "L22",
            "two-factor two-exponent bound",
            "r(S_α,β(K_1) S_α,β(K_2)) ≤ r(K_1K_2)^(α+β)",
            with_exps(Matrices::Exactly(2), ALPHA_BETA),
            R_ONLY,
            l22,
        ),
        scalar(
            "L23",
            "max-entry rescaled product chain",
            "ρ(Π S_α,β(K_i)) ≤ ρ(P^(α) ∘ (Qᵀ)^(β)) ≤ δ ρ(P^(α/s) ∘ (Qᵀ)^(β/s)) ≤ δ ρ(P)^(α/s) ρ(Q)^(β/s), P = K_1⋯K_n, Q = K_n⋯K_1, s = α+β, δ = max(‖P‖∞, ‖Q‖∞)^(s-1)",
            with_exps(Matrices::List, ALPHA_BETA),
            L2_FAMILY,
            l23,
        ),
        scalar(
            "L24",
            "max-entry rescaled symmetrization",
            "ρ(S_α,β(K)) ≤ ‖K‖∞^(α+β-1) ρ(S_α/(α+β)(K)) ≤ ‖K‖∞^(α+β-1) ρ(K)",
            with_exps(Matrices::Exactly(1), ALPHA_BETA),
            L2_FAMILY,
            l24,
        ),
        scalar(
            "L25",
            "max-entry rescaled sum",
            "ρ(Σ S_α,β(K_i)) ≤ ρ(S_α,β(Σ K_i)) ≤ ‖Σ K_i‖∞^(α+β-1) ρ(S_α/(α+β)(Σ K_i)) ≤ ‖Σ K_i‖∞^(α+β-1) ρ(Σ K_i)",
            with_exps(Matrices::List, ALPHA_BETA),
            L2_FAMILY,
            l25,
        ),
        scalar(
            "L26",
            "max-entry rescaled two-factor chain",
            "r(S_α,β(K_1) S_α,β(K_2)) ≤ r((K_1K_2)^(α) ∘ ((K_2K_1)ᵀ)^(β)) ≤ δ r((K_1K_2)^(α/s) ∘ ((K_2K_1)ᵀ)^(β/s)) ≤ δ r(K_1K_2), δ = max(‖K_1K_2‖∞, ‖K_2K_1‖∞)^(s-1)",
            with_exps(Matrices::Exactly(2), ALPHA_BETA),
            R_ONLY,
            l26,
        ),
        entrywise(
            "L27",
            "symmetrization of squares",
            "S_α(K)² ≤ S_α(K²) and S_α,β(K)² ≤ S_α,β(K²), with α replaced by α/(α+β) in the first",
            with_exps(Matrices::Exactly(1), ALPHA_BETA),
            l27,
        ),
        scalar(
            "L28",
            "dyadic refinement",
            "ρ_0 ≤ ρ_1 ≤ ⋯ ≤ ρ_N ≤ cap, ρ_n = r(S(K^(2^n)))^(2^-n)",
            with_exps(
                Matrices::Exactly(1),
                ExponentRule { depth: true, ..exps(AlphaDomain::Nonnegative, BetaDomain::Optional) },
            ),
            R_ONLY,
            l28,
        ),
        scalar(
            "L29",
            "geometric symmetrization below the weighted one",
            "ρ(S(K)) ≤ ρ(S_α(K)) ≤ ρ(K) and ρ(S(K^n))^(1/n) ≤ ρ(S_α(K^n))^(1/n) ≤ ρ(K)",
            with_exps(Matrices::Exactly(1), ExponentRule { m: true, ..ALPHA_UNIT }),
            L2_FAMILY,
            l29,
        ),
        scalar(
            "L30",
            "unimodal profile",
            "α ↦ ρ(S_α(K)) is nonincreasing on [0, 1/2], nondecreasing on [1/2, 1] and symmetric about 1/2",
            with_exps(Matrices::Exactly(1), ExponentRule { grid_points: true, ..ExponentRule::NONE }),
            L2_FAMILY,
            l30,
        ),
        scalar(
            "L31",
            "power refinement",
            "r(∘ K_i^(α_i)) ≤ r(∘ (K_i^m)^(α_i))^(1/m) ≤ Π r(K_i)^α_i",
            InputShape { exponents: ExponentRule { m: true, ..ExponentRule::NONE }, ..weighted(Matrices::List, WeightRule::Convex) },
            R_ONLY,
            l31,
        ),
        scalar(
            "L32",
            "iterated power refinement",
            "r(∘ K_i^(α_i)) ≤ r(∘ (K_i^m)^(α_i))^(1/m) ≤ r(∘ (K_i^(ml))^(α_i))^(1/(ml)) ≤ Π r(K_i)^α_i",
            InputShape {
                exponents: ExponentRule { m: true, l: true, ..ExponentRule::NONE },
                ..weighted(Matrices::List, WeightRule::Convex)
            },
            R_ONLY,
            l32,
        ),
        scalar(
            "L33",
            "rescaled power refinement",
            "r(∘ K_i^(α_i)) ≤ β r(∘ K_i^(β_i)) ≤ β r(∘ (K_i^m)^(β_i))^(1/m) ≤ β r(∘ (K_i^(ml))^(β_i))^(1/(ml)) ≤ β Π r(K_i)^β_i, β = (max ‖K_i‖∞)^(s_n-1)",
            InputShape {
                exponents: ExponentRule { m: true, l: true, ..ExponentRule::NONE },
                ..weighted(Matrices::List, WeightRule::SuperUnit)
            },
            R_ONLY,
            l33,
        ),
        scalar(
            "L34",
            "super-unit power refinement",
            "r(∘ K_i^(α_i)) ≤ r(∘ (K_i^m)^(α_i))^(1/m) ≤ r(∘ (K_i^(ml))^(α_i))^(1/(ml)) ≤ r(∘ (K_i^(ml))^(β_i))^(s_n/(ml)) ≤ Π r(K_i)^α_i",
            InputShape {
                exponents: ExponentRule { m: true, l: true, ..ExponentRule::NONE },
                ..weighted(Matrices::List, WeightRule::SuperUnit)
            },
            R_ONLY,
            l34,
        ),
        scalar(
            "L35",
            "super-unit power refinement, normalized early",
            "r(∘ K_i^(α_i)) ≤ r(∘ (K_i^m)^(α_i))^(1/m) ≤ r(∘ (K_i^m)^(β_i))^(s_n/m) ≤ r(∘ (K_i^(ml))^(β_i))^(s_n/(ml)) ≤ Π r(K_i)^α_i",
            InputShape {
                exponents: ExponentRule { m: true, l: true, ..ExponentRule::NONE },
                ..weighted(Matrices::List, WeightRule::SuperUnit)
            },
            R_ONLY,
            l35,
        ),
        scalar(
            "L36",
            "even pair-product norm bound",
            "‖∘ H_i^(α)‖ ≤ r(∘ A_j^(α))^(1/2) ≤ r(∘ P_i^(α))^(1/(2m)) ≤ r(A_ν(1)⋯A_ν(m))^(α/2), A_j = H*_τ(2j-1) H_τ(2j), α ≥ 1/m",
            family(2, 4, Parity::Even, PermRule::TauNu, exps(AlphaDomain::AtLeastPerMatrix(1.0), BetaDomain::None)),
            OP2_ONLY,
            l36,
        ),
        scalar(
            "L37",
            "even pair-product norm bound with adjoint pairs",
            "‖∘ H_i^(α)‖ ≤ r(∘ B_j^(α))^(1/2) and ‖∘ H_i^(α)‖ ≤ r(∘ A_j^(α))^(β/2) r(∘ B_j^(α))^((1-β)/2), B_j = H_τ(2j-1) H*_τ(2j)",
            family(
                2,
                4,
                Parity::Even,
                PermRule::Tau,
                ExponentRule { mix: true, ..exps(AlphaDomain::AtLeastPerMatrix(1.0), BetaDomain::None) },
            ),
            OP2_ONLY,
            l37,
        ),
        scalar(
            "L38",
            "half-family norm chain",
            "‖∘ H_i^(α)‖ ≤ r(∘_{j≤m} A_j^(α))^(1/2) ≤ r(∘_{j≤m/2} A_j^(α)) ≤ r(∘ S_i^(α))^(2/m) ≤ r(A_1⋯A_{m/2})^α, α ≥ 2/m",
            family(2, 4, Parity::Even, PermRule::Tau, exps(AlphaDomain::AtLeastPerMatrix(2.0), BetaDomain::None)),
            OP2_ONLY,
            l38,
        ),
        scalar(
            "L39",
            "mixed half-family norm chain",
            "‖∘ H_i^(α)‖ ≤ r(∘ A^(α))^(β/2) r(∘ B^(α))^((1-β)/2) ≤ r(∘_{≤m/2} A^(α))^β r(∘_{≤m/2} B^(α))^(1-β) ≤ r(∘ S_i^(α))^(2β/m) r(∘ T_i^(α))^(2(1-β)/m) ≤ r(A_1⋯A_{m/2})^(αβ) r(B_1⋯B_{m/2})^(α(1-β))",
            family(
                2,
                4,
                Parity::Even,
                PermRule::Tau,
                ExponentRule { mix: true, ..exps(AlphaDomain::AtLeastPerMatrix(2.0), BetaDomain::None) },
            ),
            OP2_ONLY,
            l39,
        ),
        scalar(
            "L40",
            "cyclic pair-product norm chain",
            "‖∘ H_i^(α)‖ ≤ r(∘ (H*_τ(j) H_ν(j))^(α))^(1/2) ≤ r(∘ Q_j^(α))^(1/(2m)) ≤ r(H*_τ(1)H_ν(1)⋯H*_τ(m)H_ν(m))^(α/2), α ≥ 1/m",
            family(1, 4, Parity::Any, PermRule::TauNu, exps(AlphaDomain::AtLeastPerMatrix(1.0), BetaDomain::None)),
            OP2_ONLY,
            l40,
        ),
        scalar(
            "L41",
            "odd pair-product norm chain",
            "‖∘ H_i^(α)‖ ≤ r((H*_1H_2)^(α) ∘ ⋯ ∘ (H*_mH_1)^(α) ∘ (H*_2H_3)^(α) ∘ ⋯ ∘ (H*_{m-1}H_m)^(α))^(1/2) ≤ r(H*_1H_2⋯H*_mH_1H*_2H_3⋯H*_{m-1}H_m)^(α/2), m odd, α ≥ 1/m",
            family(1, 5, Parity::Odd, PermRule::None, exps(AlphaDomain::AtLeastPerMatrix(1.0), BetaDomain::None)),
            OP2_ONLY,
            l41,
        ),
        scalar(
            "L42",
            "Jordan triple product bound",
            "‖A^(α) ∘ (B*)^(α) ∘ A^(α)‖ ≤ r((A*B*)^(α) ∘ (A*A)^(α) ∘ (BA)^(α))^(1/2) ≤ r(∘ Q_j^(α))^(1/6) ≤ ‖ABA‖^α, α ≥ 1/3",
            with_exps(Matrices::Exactly(2), exps(AlphaDomain::AtLeast(1.0 / 3.0), BetaDomain::None)),
            OP2_ONLY,
            l42,
        ),
        scalar(
            "L43",
            "self-adjoint Hadamard square",
            "r(C^(α) ∘ (C*)^(α)) ≤ r(C^(α) ∘ C^(α)) ≤ r(C)^(2α), α ≥ 1/2",
            with_exps(Matrices::Exactly(1), exps(AlphaDomain::AtLeast(0.5), BetaDomain::None)),
            R_ONLY,
            l43,
        ),
        scalar(
            "L44",
            "two-matrix Hadamard norm chain",
            "‖A^(α) ∘ B^(α)‖ ≤ r((A*B)^(α) ∘ (B*A)^(α))^(1/2) ≤ r((A*B)^(α) ∘ (A*B)^(α))^(1/2) ≤ r(A*B)^α, α ≥ 1/2",
            with_exps(Matrices::Exactly(2), exps(AlphaDomain::AtLeast(0.5), BetaDomain::None)),
            OP2_ONLY,
            l44,
        ),
    ];
    v.sort_by_key(|l| l.id);
    v
}

fn exact(x: f64) -> CertifiedValue {
    CertifiedValue::exact(x)
}

/// `Π v_i^{e_i}`.
fn prod_pow(vals: &[CertifiedValue], exps: &[f64]) -> CertifiedValue {
    vals.iter().zip(exps).fold(exact(1.0), |acc, (v, &e)| acc * v.powf(e))
}

/// `Σ c_i v_i`.
fn lin(vals: &[CertifiedValue], coeffs: &[f64]) -> CertifiedValue {
    vals.iter().zip(coeffs).fold(exact(0.0), |acc, (v, &c)| acc + v.scale(c))
}

/// `∘ M_i^{(α)}` with a common exponent.
fn hadamard_all(ms: &[NonnegMatrix], alpha: f64) -> Result<NonnegMatrix> {
    let mut acc = ms[0].hadamard_power(alpha)?;
    for m in &ms[1..] {
        acc = acc.hadamard_product(&m.hadamard_power(alpha)?)?;
    }
    Ok(acc)
}

fn rhos(c: &Ctx<'_>, ms: &[NonnegMatrix]) -> Result<Vec<CertifiedValue>> {
    ms.iter().map(|m| c.rho(m)).collect()
}

fn rev_product(ms: &[NonnegMatrix]) -> Result<NonnegMatrix> {
    matrix::product(ms.iter().rev())
}

fn l01(c: &Ctx<'_>) -> Result<Chain> {
    let w = c.weights();
    let lhs = c.rho(&weighted_gmean(c.mats(), w)?)?;
    let rhs = prod_pow(&rhos(c, c.mats())?, w.alphas());
    Ok(Chain::from_values(vec![(c.label("ρ(∘ K_i^(α_i))"), lhs), (c.label("Π ρ(K_i)^α_i"), rhs)]))
}

fn l02(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    let mut ch = Chain::new();
    let a = ch.matrix("H", g.h);
    let b = ch.matrix("∘ (K_1i⋯K_li)^(α_i)", weighted_gmean(&g.h_list, &g.weights)?);
    ch.link(a, b);
    Ok(ch)
}

fn l03(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    Ok(Chain::from_values(vec![
        (c.label("ρ(H)"), c.rho(&g.h)?),
        (c.label("ρ(∘ H_i^(α_i))"), c.rho(&weighted_gmean(&g.h_list, &g.weights)?)?),
        (c.label("Π ρ(H_i)^α_i"), prod_pow(&rhos(c, &g.h_list)?, g.weights.alphas())),
    ]))
}

fn l04(c: &Ctx<'_>) -> Result<Chain> {
    let k = &c.mats()[0];
    Ok(Chain::from_values(vec![("max k(i,j)".into(), exact(k.max_entry())), (c.label("ρ(K)"), c.rho(k)?)]))
}

fn powered(ms: &[NonnegMatrix], t: f64) -> Result<Vec<NonnegMatrix>> {
    ms.iter().map(|k| k.hadamard_power(t)).collect()
}

fn l05(c: &Ctx<'_>) -> Result<Chain> {
    let t = c.t();
    let mut ch = Chain::new();
    let a = ch.matrix("K_1^(t)⋯K_n^(t)", matrix::product(&powered(c.mats(), t)?)?);
    let b = ch.matrix("(K_1⋯K_n)^(t)", matrix::product(c.mats())?.hadamard_power(t)?);
    ch.link(a, b);
    Ok(ch)
}

fn l06(c: &Ctx<'_>) -> Result<Chain> {
    let t = c.t();
    Ok(Chain::from_values(vec![
        (c.label("ρ(K_1^(t)⋯K_n^(t))"), c.rho(&matrix::product(&powered(c.mats(), t)?)?)?),
        (c.label("ρ(K_1⋯K_n)^t"), c.rho(&matrix::product(c.mats())?)?.powf(t)),
    ]))
}

fn l07(c: &Ctx<'_>) -> Result<Chain> {
    let w = c.weights();
    let mut ch = Chain::new();
    let g = ch.matrix("∘ K_i^(α_i)", weighted_gmean(c.mats(), w)?);
    let cm = ch.matrix("C(K_1..K_n, α)", c_matrix(c.mats(), w)?);
    let am = ch.matrix("Σ α_i K_i", matrix::linear_comb(w.alphas(), c.mats())?);
    ch.link_run(g, am);
    debug_assert_eq!(cm, g + 1);
    Ok(ch)
}

fn l08(c: &Ctx<'_>) -> Result<Chain> {
    let w = c.weights();
    Ok(Chain::from_values(vec![
        ("r(C(K_1..K_n, α))".into(), c.rho(&c_matrix(c.mats(), w)?)?),
        ("Σ α_i r(K_i)".into(), lin(&rhos(c, c.mats())?, w.alphas())),
    ]))
}

/// `K + D_i` for each diagonal perturbation.
pub(crate) fn perturbed(k: &NonnegMatrix, ds: &[Vec<f64>]) -> Result<Vec<NonnegMatrix>> {
    ds.iter()
        .map(|d| {
            let mut m = k.clone();
            for (i, x) in d.iter().enumerate() {
                m = m.with_entry(i, i, (k.get(i, i) + x).max(0.0))?;
            }
            Ok(m)
        })
        .collect()
}

fn l09(c: &Ctx<'_>) -> Result<Chain> {
    let w = c.weights();
    let ks = perturbed(&c.mats()[0], c.input.diag_perturbations.as_deref().unwrap_or_default())?;
    Ok(Chain::from_values(vec![
        ("r(Σ α_i (K + D_i))".into(), c.rho(&matrix::linear_comb(w.alphas(), &ks)?)?),
        ("Σ α_i r(K + D_i)".into(), lin(&rhos(c, &ks)?, w.alphas())),
    ]))
}

fn l10(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let (fs, gs) = c.mats().split_at(c.mats().len() / 2);
    let terms = fs
        .iter()
        .zip(gs)
        .map(|(f, g)| f.hadamard_power(a)?.hadamard_product(&g.hadamard_power(b)?))
        .collect::<Result<Vec<_>>>()?;
    let rhs = matrix::sum(fs)?.hadamard_power(a)?.hadamard_product(&matrix::sum(gs)?.hadamard_power(b)?)?;
    let mut ch = Chain::new();
    let x = ch.matrix("Σ F_k^(α) ∘ G_k^(β)", matrix::sum(&terms)?);
    let y = ch.matrix("(Σ F_k)^(α) ∘ (Σ G_k)^(β)", rhs);
    ch.link(x, y);
    Ok(ch)
}

fn l11(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    let betas = g.weights.normalized();
    let rh = rhos(c, &g.h_list)?;
    let geo = prod_pow(&rh, betas.alphas());
    Ok(Chain::from_values(vec![
        (c.label("ρ(H)"), c.rho(&g.h)?),
        (c.label("ρ(∘ H_i^(α_i))"), c.rho(&weighted_gmean(&g.h_list, &g.weights)?)?),
        (c.label("β ρ(∘ H_i^(β_i))"), c.rho(&weighted_gmean(&g.h_list, &betas)?)?.scale(g.beta)),
        (c.label("β Π ρ(H_i)^β_i"), geo.scale(g.beta)),
        (c.label("β Σ β_i ρ(H_i)"), lin(&rh, betas.alphas()).scale(g.beta)),
        (c.label("β Σ α_i ρ(H_i)"), lin(&rh, g.weights.alphas()).scale(g.beta)),
    ]))
}

fn l12(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    let betas = g.weights.normalized();
    let rh = rhos(c, &g.h_list)?;
    Ok(Chain::from_values(vec![
        (c.label("ρ(H)"), c.rho(&g.h)?),
        (c.label("ρ(∘ H_i^(α_i))"), c.rho(&weighted_gmean(&g.h_list, &g.weights)?)?),
        (c.label("β ρ(∘ H_i^(β_i))"), c.rho(&weighted_gmean(&g.h_list, &betas)?)?.scale(g.beta)),
        (c.label("β ρ(C(H_1..H_n, β))"), c.rho(&c_matrix(&g.h_list, &betas)?)?.scale(g.beta)),
        (c.label("β Σ β_i ρ(H_i)"), lin(&rh, betas.alphas()).scale(g.beta)),
    ]))
}

fn l13(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    let betas = g.weights.normalized();
    let rh = rhos(c, &g.h_list)?;
    Ok(Chain::from_values(vec![
        (c.label("ρ(H)"), c.rho(&g.h)?),
        (c.label("ρ(∘ H_i^(α_i))"), c.rho(&weighted_gmean(&g.h_list, &g.weights)?)?),
        (c.label("β ρ(∘ H_i^(β_i))"), c.rho(&weighted_gmean(&g.h_list, &betas)?)?.scale(g.beta)),
        (c.label("β ρ(C(H_1..H_n, β))"), c.rho(&c_matrix(&g.h_list, &betas)?)?.scale(g.beta)),
        (c.label("β ρ(Σ β_i H_i)"), c.rho(&matrix::linear_comb(betas.alphas(), &g.h_list)?)?.scale(g.beta)),
        (c.label("β Σ β_i ρ(H_i)"), lin(&rh, betas.alphas()).scale(g.beta)),
    ]))
}

fn l14(c: &Ctx<'_>) -> Result<Chain> {
    let g = c.grid_bundle()?;
    let dim = g.h.dim() as f64;
    Ok(Chain::from_values(vec![
        ("r(H)".into(), c.rho(&g.h)?),
        ("r(∘ H_i^(α_i))".into(), c.rho(&weighted_gmean(&g.h_list, &g.weights)?)?),
        ("(m - 1) δ".into(), exact((dim - 1.0) * g.delta)),
    ]))
}

/// Terms of the product chain for `S_{α,β}` and, when `rescale` is set,
/// the max-entry rescaled continuation.
fn sym_product_chain(c: &Ctx<'_>, a: f64, b: f64, rescale: bool) -> Result<Chain> {
    let ks = c.mats();
    let syms = ks.iter().map(|k| sym(k, a, b)).collect::<Result<Vec<_>>>()?;
    let p = matrix::product(ks)?;
    let q = rev_product(ks)?;
    let mixed = |x: f64, y: f64| -> Result<NonnegMatrix> {
        p.hadamard_power(x)?.hadamard_product(&q.transpose().hadamard_power(y)?)
    };
    let mut terms = vec![
        (c.label("ρ(Π S(K_i))"), c.rho(&matrix::product(&syms)?)?),
        (c.label("ρ(P^(α) ∘ (Qᵀ)^(β))"), c.rho(&mixed(a, b)?)?),
    ];
    let (rp, rq) = (c.rho(&p)?, c.rho(&q)?);
    if rescale {
        let s = a + b;
        let delta = p.max_entry().max(q.max_entry()).powf(s - 1.0);
        terms.push((c.label("δ ρ(P^(α/s) ∘ (Qᵀ)^(β/s))"), c.rho(&mixed(a / s, b / s)?)?.scale(delta)));
        terms.push((c.label("δ ρ(P)^(α/s) ρ(Q)^(β/s)"), (rp.powf(a / s) * rq.powf(b / s)).scale(delta)));
    } else {
        terms.push((c.label("ρ(P)^α ρ(Q)^β"), rp.powf(a) * rq.powf(b)));
    }
    Ok(Chain::from_values(terms))
}

fn l15(c: &Ctx<'_>) -> Result<Chain> {
    let a = c.alpha();
    sym_product_chain(c, a, 1.0 - a, false)
}

fn sym_sum_chain(c: &Ctx<'_>, a: f64, b: f64) -> Result<Chain> {
    let ks = c.mats();
    let syms = ks.iter().map(|k| sym(k, a, b)).collect::<Result<Vec<_>>>()?;
    let total = matrix::sum(ks)?;
    Ok(Chain::from_values(vec![
        (c.label("ρ(Σ S(K_i))"), c.rho(&matrix::sum(&syms)?)?),
        (c.label("ρ(S(Σ K_i))"), c.rho(&sym(&total, a, b)?)?),
        (c.label("ρ(Σ K_i)^(α+β)"), c.rho(&total)?.powf(a + b)),
    ]))
}

fn l16(c: &Ctx<'_>) -> Result<Chain> {
    let a = c.alpha();
    sym_sum_chain(c, a, 1.0 - a)
}

fn l17(c: &Ctx<'_>) -> Result<Chain> {
    let k = &c.mats()[0];
    Ok(Chain::from_values(vec![
        (c.label("ρ(S_α(K))"), c.rho(&sym_alpha(k, c.alpha())?)?),
        (c.label("ρ(K)"), c.rho(k)?),
    ]))
}

fn l18(c: &Ctx<'_>) -> Result<Chain> {
    let a = c.alpha();
    two_factor_chain(c, a, 1.0 - a, false)
}

/// `r(S(K_1) S(K_2)) ≤ r((K_1K_2)^(α) ∘ ((K_2K_1)ᵀ)^(β)) ≤ [δ r(rescaled) ≤] δ r(K_1K_2)`.
fn two_factor_chain(c: &Ctx<'_>, a: f64, b: f64, rescale: bool) -> Result<Chain> {
    let (k1, k2) = (&c.mats()[0], &c.mats()[1]);
    let p = k1.matmul(k2)?;
    let q = k2.matmul(k1)?;
    let mixed = |x: f64, y: f64| -> Result<NonnegMatrix> {
        p.hadamard_power(x)?.hadamard_product(&q.transpose().hadamard_power(y)?)
    };
    let mut terms = vec![
        ("r(S(K_1) S(K_2))".to_string(), c.rho(&sym(k1, a, b)?.matmul(&sym(k2, a, b)?)?)?),
        ("r((K_1K_2)^(α) ∘ ((K_2K_1)ᵀ)^(β))".to_string(), c.rho(&mixed(a, b)?)?),
    ];
    let rp = c.rho(&p)?;
    if rescale {
        let s = a + b;
        let delta = p.max_entry().max(q.max_entry()).powf(s - 1.0);
        terms.push(("δ r((K_1K_2)^(α/s) ∘ ((K_2K_1)ᵀ)^(β/s))".into(), c.rho(&mixed(a / s, b / s)?)?.scale(delta)));
        terms.push(("δ r(K_1K_2)".into(), rp.scale(delta)));
    } else {
        terms.push(("r(K_1K_2)".into(), rp));
    }
    Ok(Chain::from_values(terms))
}

fn l19(c: &Ctx<'_>) -> Result<Chain> {
    sym_product_chain(c, c.alpha(), c.beta(), false)
}

fn l20(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let k = &c.mats()[0];
    Ok(Chain::from_values(vec![
        (c.label("ρ(S_α,β(K))"), c.rho(&sym(k, a, b)?)?),
        (c.label("ρ(K)^(α+β)"), c.rho(k)?.powf(a + b)),
    ]))
}

fn l21(c: &Ctx<'_>) -> Result<Chain> {
    sym_sum_chain(c, c.alpha(), c.beta())
}

fn l22(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let (k1, k2) = (&c.mats()[0], &c.mats()[1]);
    Ok(Chain::from_values(vec![
        ("r(S_α,β(K_1) S_α,β(K_2))".into(), c.rho(&sym(k1, a, b)?.matmul(&sym(k2, a, b)?)?)?),
        ("r(K_1K_2)^(α+β)".into(), c.rho(&k1.matmul(k2)?)?.powf(a + b)),
    ]))
}

fn l23(c: &Ctx<'_>) -> Result<Chain> {
    sym_product_chain(c, c.alpha(), c.beta(), true)
}

fn rescaled_sym_terms(c: &Ctx<'_>, k: &NonnegMatrix, a: f64, b: f64) -> Result<Vec<(String, CertifiedValue)>> {
    let s = a + b;
    let scale = k.max_entry().powf(s - 1.0);
    Ok(vec![
        (c.label("‖K‖∞^(s-1) ρ(S_α/s(K))"), c.rho(&sym_alpha(k, (a / s).min(1.0))?)?.scale(scale)),
        (c.label("‖K‖∞^(s-1) ρ(K)"), c.rho(k)?.scale(scale)),
    ])
}

fn l24(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let k = &c.mats()[0];
    let mut terms = vec![(c.label("ρ(S_α,β(K))"), c.rho(&sym(k, a, b)?)?)];
    terms.extend(rescaled_sym_terms(c, k, a, b)?);
    Ok(Chain::from_values(terms))
}

fn l25(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let ks = c.mats();
    let syms = ks.iter().map(|k| sym(k, a, b)).collect::<Result<Vec<_>>>()?;
    let total = matrix::sum(ks)?;
    let mut terms = vec![
        (c.label("ρ(Σ S_α,β(K_i))"), c.rho(&matrix::sum(&syms)?)?),
        (c.label("ρ(S_α,β(Σ K_i))"), c.rho(&sym(&total, a, b)?)?),
    ];
    terms.extend(rescaled_sym_terms(c, &total, a, b)?);
    Ok(Chain::from_values(terms))
}

fn l26(c: &Ctx<'_>) -> Result<Chain> {
    two_factor_chain(c, c.alpha(), c.beta(), true)
}

fn l27(c: &Ctx<'_>) -> Result<Chain> {
    let (a, b) = (c.alpha(), c.beta());
    let k = &c.mats()[0];
    let k2 = k.matmul(k)?;
    let a1 = (a / (a + b)).min(1.0);
    let s1 = sym_alpha(k, a1)?;
    let s2 = sym(k, a, b)?;
    let mut ch = Chain::new();
    let x = ch.matrix("S_α(K)²", s1.matmul(&s1)?);
    let y = ch.matrix("S_α(K²)", sym_alpha(&k2, a1)?);
    ch.link(x, y);
    let x = ch.matrix("S_α,β(K)²", s2.matmul(&s2)?);
    let y = ch.matrix("S_α,β(K²)", sym(&k2, a, b)?);
    ch.link(x, y);
    Ok(ch)
}

fn l28(c: &Ctx<'_>) -> Result<Chain> {
    let e = &c.input.exponents;
    let seq = constructions::refinement_sequence(
        &c.mats()[0],
        c.alpha(),
        e.beta,
        e.depth.unwrap_or(0),
        c.f(),
        &c.tol.spectral,
    )?;
    let mut terms: Vec<(String, CertifiedValue)> =
        seq.brackets.iter().enumerate().map(|(n, b)| (format!("ρ_{n}"), *b)).collect();
    terms.push(("cap".into(), seq.cap_bracket));
    Ok(Chain::from_values(terms))
}

fn l29(c: &Ctx<'_>) -> Result<Chain> {
    let k = &c.mats()[0];
    let a = c.alpha();
    let n = c.m();
    let kn = k.matpow(n as u32)?;
    let root = 1.0 / n as f64;
    let rk = c.rho(k)?;
    let mut ch = Chain::new();
    let i0 = ch.scalar(c.label("ρ(S(K))"), c.rho(&constructions::geometric_symmetrization(k)?)?);
    ch.scalar(c.label("ρ(S_α(K))"), c.rho(&sym_alpha(k, a)?)?);
    let i2 = ch.scalar(c.label("ρ(K)"), rk);
    ch.link_run(i0, i2);
    let j0 = ch.scalar(c.label("ρ(S(K^n))^(1/n)"), c.rho(&constructions::geometric_symmetrization(&kn)?)?.powf(root));
    ch.scalar(c.label("ρ(S_α(K^n))^(1/n)"), c.rho(&sym_alpha(&kn, a)?)?.powf(root));
    let j2 = ch.scalar(c.label("ρ(K)"), rk);
    ch.link_run(j0, j2);
    Ok(ch)
}

fn l30(c: &Ctx<'_>) -> Result<Chain> {
    let k = &c.mats()[0];
    let g = c.input.exponents.grid_points.unwrap_or(3);
    let prof = constructions::alpha_profile(k, c.f(), g, &c.tol.spectral)?;
    let mut ch = Chain::new();
    for (a, v) in prof.grid.iter().zip(prof.brackets) {
        ch.scalar(c.label(&format!("ρ(S_{a}(K))")), v);
    }
    let mid = g / 2;
    for i in 0..mid {
        ch.link(i + 1, i);
    }
    for i in mid..g - 1 {
        ch.link(i, i + 1);
    }
    for i in 0..mid {
        ch.link(i, g - 1 - i);
        ch.link(g - 1 - i, i);
    }
    Ok(ch)
}

fn powers(ks: &[NonnegMatrix], p: usize) -> Result<Vec<NonnegMatrix>> {
    ks.iter().map(|k| k.matpow(p as u32)).collect()
}

/// `r(∘ (K_i^p)^(w_i))^(e)`.
fn refined(c: &Ctx<'_>, ks: &[NonnegMatrix], p: usize, w: &Weights, e: f64) -> Result<CertifiedValue> {
    Ok(c.rho(&weighted_gmean(&powers(ks, p)?, w)?)?.powf(e))
}

fn l31(c: &Ctx<'_>) -> Result<Chain> {
    let (ks, w, m) = (c.mats(), c.weights(), c.m());
    Ok(Chain::from_values(vec![
        ("r(∘ K_i^(α_i))".into(), refined(c, ks, 1, w, 1.0)?),
        ("r(∘ (K_i^m)^(α_i))^(1/m)".into(), refined(c, ks, m, w, 1.0 / m as f64)?),
        ("Π r(K_i)^α_i".into(), prod_pow(&rhos(c, ks)?, w.alphas())),
    ]))
}

fn l32(c: &Ctx<'_>) -> Result<Chain> {
    let (ks, w, m, l) = (c.mats(), c.weights(), c.m(), c.l());
    Ok(Chain::from_values(vec![
        ("r(∘ K_i^(α_i))".into(), refined(c, ks, 1, w, 1.0)?),
        ("r(∘ (K_i^m)^(α_i))^(1/m)".into(), refined(c, ks, m, w, 1.0 / m as f64)?),
        ("r(∘ (K_i^(ml))^(α_i))^(1/(ml))".into(), refined(c, ks, m * l, w, 1.0 / (m * l) as f64)?),
        ("Π r(K_i)^α_i".into(), prod_pow(&rhos(c, ks)?, w.alphas())),
    ]))
}

fn l33(c: &Ctx<'_>) -> Result<Chain> {
    let (ks, w, m, l) = (c.mats(), c.weights(), c.m(), c.l());
    let betas = w.normalized();
    let big_m = ks.iter().map(NonnegMatrix::max_entry).fold(0.0, f64::max);
    let beta = big_m.powf(w.beta_scale_exponent());
    let ml = m * l;
    Ok(Chain::from_values(vec![
        ("r(∘ K_i^(α_i))".into(), refined(c, ks, 1, w, 1.0)?),
        ("β r(∘ K_i^(β_i))".into(), refined(c, ks, 1, &betas, 1.0)?.scale(beta)),
        ("β r(∘ (K_i^m)^(β_i))^(1/m)".into(), refined(c, ks, m, &betas, 1.0 / m as f64)?.scale(beta)),
        ("β r(∘ (K_i^(ml))^(β_i))^(1/(ml))".into(), refined(c, ks, ml, &betas, 1.0 / ml as f64)?.scale(beta)),
        ("β Π r(K_i)^β_i".into(), prod_pow(&rhos(c, ks)?, betas.alphas()).scale(beta)),
    ]))
}

fn l34(c: &Ctx<'_>) -> Result<Chain> {
    let (ks, w, m, l) = (c.mats(), c.weights(), c.m(), c.l());
    let betas = w.normalized();
    let (s, ml) = (w.sum(), m * l);
    Ok(Chain::from_values(vec![
        ("r(∘ K_i^(α_i))".into(), refined(c, ks, 1, w, 1.0)?),
        ("r(∘ (K_i^m)^(α_i))^(1/m)".into(), refined(c, ks, m, w, 1.0 / m as f64)?),
        ("r(∘ (K_i^(ml))^(α_i))^(1/(ml))".into(), refined(c, ks, ml, w, 1.0 / ml as f64)?),
        ("r(∘ (K_i^(ml))^(β_i))^(s_n/(ml))".into(), refined(c, ks, ml, &betas, s / ml as f64)?),
        ("Π r(K_i)^α_i".into(), prod_pow(&rhos(c, ks)?, w.alphas())),
    ]))
}

fn l35(c: &Ctx<'_>) -> Result<Chain> {
    let (ks, w, m, l) = (c.mats(), c.weights(), c.m(), c.l());
    let betas = w.normalized();
    let (s, ml) = (w.sum(), m * l);
    Ok(Chain::from_values(vec![
        ("r(∘ K_i^(α_i))".into(), refined(c, ks, 1, w, 1.0)?),
        ("r(∘ (K_i^m)^(α_i))^(1/m)".into(), refined(c, ks, m, w, 1.0 / m as f64)?),
        ("r(∘ (K_i^m)^(β_i))^(s_n/m)".into(), refined(c, ks, m, &betas, s / m as f64)?),
        ("r(∘ (K_i^(ml))^(β_i))^(s_n/(ml))".into(), refined(c, ks, ml, &betas, s / ml as f64)?),
        ("Π r(K_i)^α_i".into(), prod_pow(&rhos(c, ks)?, w.alphas())),
    ]))
}

/// `‖H_1^(α) ∘ ⋯ ∘ H_m^(α)‖`.
fn lead_norm(c: &Ctx<'_>, hs: &[NonnegMatrix], a: f64) -> Result<CertifiedValue> {
    c.op2(&hadamard_all(hs, a)?)
}

fn l36(c: &Ctx<'_>) -> Result<Chain> {
    let (hs, a) = (c.mats(), c.alpha());
    let m = hs.len() as f64;
    let aa = pair_family(hs, c.tau(), None, PairKind::A)?;
    let ps = cyclic_products(&aa, Some(c.nu()))?;
    Ok(Chain::from_values(vec![
        ("‖∘ H_i^(α)‖".into(), lead_norm(c, hs, a)?),
        ("r(∘ A_j^(α))^(1/2)".into(), c.r(&hadamard_all(&aa, a)?).sqrt()),
        ("r(∘ P_i^(α))^(1/(2m))".into(), c.r(&hadamard_all(&ps, a)?).powf(0.5 / m)),
        ("r(A_ν(1)⋯A_ν(m))^(α/2)".into(), c.r(&ps[0]).powf(a / 2.0)),
    ]))
}

fn l37(c: &Ctx<'_>) -> Result<Chain> {
    let (hs, a, mix) = (c.mats(), c.alpha(), c.mix());
    let ra = c.r(&hadamard_all(&pair_family(hs, c.tau(), None, PairKind::A)?, a)?);
    let rb = c.r(&hadamard_all(&pair_family(hs, c.tau(), None, PairKind::B)?, a)?);
    let mut ch = Chain::new();
    let n = ch.scalar("‖∘ H_i^(α)‖", lead_norm(c, hs, a)?);
    let x = ch.scalar("r(∘ B_j^(α))^(1/2)", rb.sqrt());
    let y = ch.scalar("r(∘ A_j^(α))^(β/2) r(∘ B_j^(α))^((1-β)/2)", ra.powf(mix / 2.0) * rb.powf((1.0 - mix) / 2.0));
    ch.link(n, x);
    ch.link(n, y);
    Ok(ch)
}

/// Radii along the half-family chain for pair kind `kind`:
/// `(r(∘ all^(α)), r(∘ half^(α)), r(∘ S_i^(α)), r(product of half))`.
fn half_family(c: &Ctx<'_>, kind: PairKind) -> Result<[CertifiedValue; 4]> {
    let (hs, a) = (c.mats(), c.alpha());
    let all = pair_family(hs, c.tau(), None, kind)?;
    let half = &all[..all.len() / 2];
    let rot = cyclic_products(half, None)?;
    Ok([c.r(&hadamard_all(&all, a)?), c.r(&hadamard_all(half, a)?), c.r(&hadamard_all(&rot, a)?), c.r(&rot[0])])
}

fn l38(c: &Ctx<'_>) -> Result<Chain> {
    let (hs, a) = (c.mats(), c.alpha());
    let m = hs.len() as f64;
    let [all, half, rot, prod] = half_family(c, PairKind::A)?;
    Ok(Chain::from_values(vec![
        ("‖∘ H_i^(α)‖".into(), lead_norm(c, hs, a)?),
        ("r(∘_{j≤m} A_j^(α))^(1/2)".into(), all.sqrt()),
        ("r(∘_{j≤m/2} A_j^(α))".into(), half),
        ("r(∘ S_i^(α))^(2/m)".into(), rot.powf(2.0 / m)),
        ("r(A_1⋯A_{m/2})^α".into(), prod.powf(a)),
    ]))
}

fn l39(c: &Ctx<'_>) -> Result<Chain> {
    let (hs, a, mix) = (c.mats(), c.alpha(), c.mix());
    let m = hs.len() as f64;
    let [a_all, a_half, a_rot, a_prod] = half_family(c, PairKind::A)?;
    let [b_all, b_half, b_rot, b_prod] = half_family(c, PairKind::B)?;
    let pair = |x: CertifiedValue, ex: f64, y: CertifiedValue, ey: f64| x.powf(ex) * y.powf(ey);
    Ok(Chain::from_values(vec![
        ("‖∘ H_i^(α)‖".into(), lead_norm(c, hs, a)?),
        ("r(∘ A^(α))^(β/2) r(∘ B^(α))^((1-β)/2)".into(), pair(a_all, mix / 2.0, b_all, (1.0 - mix) / 2.0)),
        ("r(∘_{≤m/2} A^(α))^β r(∘_{≤m/2} B^(α))^(1-β)".into(), pair(a_half, mix, b_half, 1.0 - mix)),
        (
            "r(∘ S_i^(α))^(2β/m) r(∘ T_i^(α))^(2(1-β)/m)".into(),
            pair(a_rot, 2.0 * mix / m, b_rot, 2.0 * (1.0 - mix) / m),
        ),
        ("r(A_1⋯A_{m/2})^(αβ) r(B_1⋯B_{m/2})^(α(1-β))".into(), pair(a_prod, a * mix, b_prod, a * (1.0 - mix))),
    ]))
}

/// `‖∘ H^(α)‖ ≤ r(∘ X_j^(α))^(1/2) [≤ r(∘ Q_j^(α))^(1/(2m))] ≤ r(X_1⋯X_m)^(α/2)`
/// with `X_j = H*_τ(j) H_ν(j)`.
fn q_chain(
    c: &Ctx<'_>,
    hs: &[NonnegMatrix],
    tau: &crate::matrix::Permutation,
    nu: &crate::matrix::Permutation,
    with_q: bool,
) -> Result<Vec<(String, CertifiedValue)>> {
    let a = c.alpha();
    let m = hs.len();
    let xs = (0..m).map(|k| hs[tau.apply(k)].transpose().matmul(&hs[nu.apply(k)])).collect::<Result<Vec<_>>>()?;
    let qs = pair_family(hs, tau, Some(nu), PairKind::Q)?;
    let mut terms = vec![
        ("‖∘ H_i^(α)‖".to_string(), lead_norm(c, hs, a)?),
        ("r(∘ (H*_τ(j) H_ν(j))^(α))^(1/2)".to_string(), c.r(&hadamard_all(&xs, a)?).sqrt()),
    ];
    if with_q {
        terms.push(("r(∘ Q_j^(α))^(1/(2m))".into(), c.r(&hadamard_all(&qs, a)?).powf(0.5 / m as f64)));
    }
    terms.push(("r(H*_τ(1)H_ν(1)⋯H*_τ(m)H_ν(m))^(α/2)".into(), c.r(&qs[0]).powf(a / 2.0)));
    Ok(terms)
}

fn l40(c: &Ctx<'_>) -> Result<Chain> {
    Ok(Chain::from_values(q_chain(c, c.mats(), c.tau(), c.nu(), true)?))
}

fn l41(c: &Ctx<'_>) -> Result<Chain> {
    let (tau, nu) = odd_pairing(c.mats().len())?;
    Ok(Chain::from_values(q_chain(c, c.mats(), &tau, &nu, false)?))
}

fn l42(c: &Ctx<'_>) -> Result<Chain> {
    let (a_m, b_m) = (&c.mats()[0], &c.mats()[1]);
    let hs = [a_m.clone(), b_m.transpose(), a_m.clone()];
    let (tau, nu) = odd_pairing(3)?;
    let mut terms = q_chain(c, &hs, &tau, &nu, true)?;
    let aba = matrix::product([a_m, b_m, a_m])?;
    let last = terms.last_mut().expect("nonempty chain");
    *last = ("‖ABA‖^α".into(), c.op2(&aba)?.powf(c.alpha()));
    terms[0].0 = "‖A^(α) ∘ (B*)^(α) ∘ A^(α)‖".into();
    terms[1].0 = "r((A*B*)^(α) ∘ (A*A)^(α) ∘ (BA)^(α))^(1/2)".into();
    terms[2].0 = "r(∘ Q_j^(α))^(1/6)".into();
    Ok(Chain::from_values(terms))
}

fn l43(c: &Ctx<'_>) -> Result<Chain> {
    let k = &c.mats()[0];
    let a = c.alpha();
    let ka = k.hadamard_power(a)?;
    Ok(Chain::from_values(vec![
        ("r(C^(α) ∘ (C*)^(α))".into(), c.rho(&ka.hadamard_product(&k.transpose().hadamard_power(a)?)?)?),
        ("r(C^(α) ∘ C^(α))".into(), c.rho(&ka.hadamard_product(&ka)?)?),
        ("r(C)^(2α)".into(), c.rho(k)?.powf(2.0 * a)),
    ]))
}

fn l44(c: &Ctx<'_>) -> Result<Chain> {
    let (a_m, b_m) = (&c.mats()[0], &c.mats()[1]);
    let a = c.alpha();
    let ab = a_m.transpose().matmul(b_m)?.hadamard_power(a)?;
    let ba = b_m.transpose().matmul(a_m)?.hadamard_power(a)?;
    Ok(Chain::from_values(vec![
        ("‖A^(α) ∘ B^(α)‖".into(), lead_norm(c, c.mats(), a)?),
        ("r((A*B)^(α) ∘ (B*A)^(α))^(1/2)".into(), c.r(&ab.hadamard_product(&ba)?).sqrt()),
        ("r((A*B)^(α) ∘ (A*B)^(α))^(1/2)".into(), c.r(&ab.hadamard_product(&ab)?).sqrt()),
        ("r(A*B)^α".into(), c.r(&a_m.transpose().matmul(b_m)?).powf(a)),
    ]))
}
