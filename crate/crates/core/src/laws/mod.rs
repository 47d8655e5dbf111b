//! Machine-readable catalog of the inequalities and a uniform evaluator that
//! turns an input into a labeled chain of terms with per-link verdicts.

mod catalog;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use catalog::catalog;

use crate::constructions::{self, GridBundle};
use crate::error::{Error, Result};
use crate::matrix::{entrywise_leq, NonnegMatrix, Permutation, Slack, Weights};
use crate::spectral::{self, CertifiedValue, Functional, SpectralOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ScalarChain,
    Entrywise,
}

/// How the matrices of an input are organized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matrices {
    Exactly(usize),
    /// `K_1, .., K_n` with one weight per matrix.
    List,
    /// An `l × n` grid `K_{ki}`, stored row by row, one weight per column.
    Grid,
    /// `F_1, .., F_m` followed by `G_1, .., G_m`.
    Pairs,
    /// `H_1, .., H_m` for the norm bounds.
    Family {
        min: usize,
        max: usize,
    },
    /// A single base matrix plus one diagonal perturbation per weight.
    BaseWithDiagonals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    None,
    /// Nonnegative weights with `s_n = 1`.
    Convex,
    /// Nonnegative weights with `s_n >= 1`.
    SuperUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermRule {
    None,
    Tau,
    TauNu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Any,
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaDomain {
    None,
    /// `α ∈ [0, 1]`.
    Unit,
    /// `α >= c`.
    AtLeast(f64),
    /// `α >= c / m` where `m` is the number of matrices.
    AtLeastPerMatrix(f64),
    /// `α >= 0`, paired with a `β` such that `α + β >= 1`.
    Nonnegative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaDomain {
    None,
    /// `β >= 0` and `α + β >= 1`.
    SumAtLeastOne,
    /// Either absent or as in `SumAtLeastOne`.
    Optional,
}

/// Which scalar parameters a law reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentRule {
    pub t: bool,
    pub m: bool,
    pub l: bool,
    pub alpha: AlphaDomain,
    pub beta: BetaDomain,
    pub mix: bool,
    pub depth: bool,
    pub grid_points: bool,
}

impl ExponentRule {
    pub const NONE: ExponentRule = ExponentRule {
        t: false,
        m: false,
        l: false,
        alpha: AlphaDomain::None,
        beta: BetaDomain::None,
        mix: false,
        depth: false,
        grid_points: false,
    };
}

/// Extra hypotheses that random inputs must be filtered for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Filter {
    /// The diagonal of `H_1^{(α_1)} ∘ ⋯ ∘ H_n^{(α_n)}` vanishes.
    ZeroDiagonalMean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputShape {
    pub matrices: Matrices,
    pub weights: WeightRule,
    pub perms: PermRule,
    pub exponents: ExponentRule,
    pub parity: Parity,
    pub filter: Option<Filter>,
}

impl InputShape {
    const fn new(matrices: Matrices) -> Self {
        InputShape {
            matrices,
            weights: WeightRule::None,
            perms: PermRule::None,
            exponents: ExponentRule::NONE,
            parity: Parity::Any,
            filter: None,
        }
    }
}

impl fmt::Display for InputShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![match self.matrices {
            Matrices::Exactly(1) => "one matrix".to_string(),
            Matrices::Exactly(k) => format!("{k} matrices"),
            Matrices::List => "n matrices".into(),
            Matrices::Grid => "l×n grid".into(),
            Matrices::Pairs => "m pairs (F_k, G_k)".into(),
            Matrices::Family { min, max } => format!("m ∈ [{min}, {max}] matrices"),
            Matrices::BaseWithDiagonals => "base matrix and n diagonal perturbations".into(),
        }];
        match self.parity {
            Parity::Any => {}
            Parity::Even => parts.push("m even".into()),
            Parity::Odd => parts.push("m odd".into()),
        }
        match self.weights {
            WeightRule::None => {}
            WeightRule::Convex => parts.push("weights with s_n = 1".into()),
            WeightRule::SuperUnit => parts.push("weights with s_n ≥ 1".into()),
        }
        match self.perms {
            PermRule::None => {}
            PermRule::Tau => parts.push("τ".into()),
            PermRule::TauNu => parts.push("τ, ν".into()),
        }
        let e = &self.exponents;
        for (on, name) in [(e.t, "t ≥ 1"), (e.m, "m ≥ 1"), (e.l, "l ≥ 1"), (e.mix, "mix ∈ [0,1]"), (e.depth, "depth")]
        {
            if on {
                parts.push(name.into());
            }
        }
        match e.alpha {
            AlphaDomain::None => {}
            AlphaDomain::Unit => parts.push("α ∈ [0,1]".into()),
            AlphaDomain::AtLeast(c) => parts.push(format!("α ≥ {c}")),
            AlphaDomain::AtLeastPerMatrix(c) => parts.push(format!("α ≥ {c}/m")),
            AlphaDomain::Nonnegative => parts.push("α ≥ 0".into()),
        }
        match e.beta {
            BetaDomain::None => {}
            BetaDomain::SumAtLeastOne => parts.push("β ≥ 0, α+β ≥ 1".into()),
            BetaDomain::Optional => parts.push("optional β with α+β ≥ 1".into()),
        }
        if e.grid_points {
            parts.push("odd grid size".into());
        }
        if self.filter == Some(Filter::ZeroDiagonalMean) {
            parts.push("mean has zero diagonal".into());
        }
        f.write_str(&parts.join("; "))
    }
}

pub type EvalFn = fn(&Ctx<'_>) -> Result<Chain>;

/// One catalog row.
#[derive(Clone)]
pub struct LawSpec {
    pub id: &'static str,
    pub name: &'static str,
    /// The inequality as a formula.
    pub statement: &'static str,
    pub shape: InputShape,
    pub functionals: &'static [Functional],
    /// The numerical radius is admitted only for convex weights.
    pub w_needs_convex: bool,
    pub mode: Mode,
    pub eval: EvalFn,
}

impl fmt::Debug for LawSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LawSpec").field("id", &self.id).field("statement", &self.statement).finish()
    }
}

impl LawSpec {
    /// Whether `f` is admissible for this law on the given input.
    pub fn admits(&self, f: Functional, input: &LawInput) -> bool {
        if !self.functionals.contains(&f) {
            return false;
        }
        f != Functional::NumericalRadius
            || !self.w_needs_convex
            || input.weights.as_ref().is_some_and(Weights::is_convex)
    }

    /// The functionals a campaign iterates over; `None` for entrywise laws.
    pub fn campaign_functionals(&self) -> Vec<Option<Functional>> {
        match self.mode {
            Mode::Entrywise => vec![None],
            Mode::ScalarChain => self.functionals.iter().map(|&f| Some(f)).collect(),
        }
    }
}

pub fn find_law(id: &str) -> Result<LawSpec> {
    catalog().into_iter().find(|l| l.id.eq_ignore_ascii_case(id)).ok_or_else(|| Error::UnknownLaw(id.into()))
}

/// Scalar parameters of an input. Unused fields stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mix: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

/// Grid dimensions `(l, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LawInput {
    pub matrices: Vec<NonnegMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDims>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weights>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Permutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Permutation>,
    #[serde(default)]
    pub exponents: Exponents,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_perturbations: Option<Vec<Vec<f64>>>,
}

impl LawInput {
    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, NonnegMatrix::dim)
    }

    /// The grid as rows of matrices.
    pub fn grid_rows(&self) -> Vec<Vec<NonnegMatrix>> {
        match self.grid {
            Some(g) => self.matrices.chunks(g.cols).map(<[_]>::to_vec).collect(),
            None => vec![self.matrices.clone()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub spectral: SpectralOptions,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, spectral: SpectralOptions::default() }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok =
            [self.rtol, self.atol, self.spectral.rtol, self.spectral.atol].iter().all(|t| t.is_finite() && *t > 0.0);
        if !ok {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn slack(&self) -> Slack {
        Slack { rtol: self.rtol, atol: self.atol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Scalar,
    Entrywise,
}

/// One asserted comparison `term[from] <= term[to]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub from: usize,
    pub to: usize,
    pub kind: LinkKind,
    /// The compared numbers; for entrywise links the critical entry pair.
    pub lhs: f64,
    pub rhs: f64,
    /// Sum of the certification widths of both terms.
    pub width: f64,
    /// `lhs - rhs` for scalars, `max (a(i,j) - b(i,j))` for matrices.
    pub worst_gap: f64,
    /// 1-based entry of `worst_gap` for entrywise links.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_index: Option<(usize, usize)>,
    /// Largest entry of the right-hand matrix for entrywise links.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_scale: Option<f64>,
    pub holds: bool,
}

impl Link {
    fn holds_under(&self, rtol: f64, atol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rtol) + atol + self.width
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<Functional>,
    pub labels: Vec<String>,
    /// Term values; for matrix terms the largest entry.
    pub values: Vec<f64>,
    /// Certification widths of the terms.
    pub widths: Vec<f64>,
    pub links: Vec<Link>,
    pub slack_used: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_link: Option<usize>,
    pub rtol: f64,
    pub atol: f64,
    /// Whether every spectral bracket met its tolerance.
    pub converged: bool,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Largest `(lhs - rhs) / |rhs|` over the links.
    pub fn max_relative_gap(&self) -> f64 {
        self.links
            .iter()
            .map(|l| (l.lhs - l.rhs) / l.rhs.abs().max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest share of the allowed slack `rhs·rtol + atol + width` that a
    /// link spends on `lhs - rhs`; at most 1 on a passing report.
    pub fn slack_fraction(&self) -> f64 {
        self.links.iter().map(|l| (l.lhs - l.rhs) / (l.rhs.abs() * self.rtol + self.atol + l.width)).fold(0.0, f64::max)
    }
}

/// Re-derives the verdict from the stored links.
pub fn check_report(rep: &LawReport, rtol: f64, atol: f64) -> Verdict {
    if rep.links.iter().all(|l| l.holds_under(rtol, atol)) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Evaluation context handed to each law.
pub struct Ctx<'a> {
    pub input: &'a LawInput,
    pub functional: Option<Functional>,
    pub tol: Tolerances,
}

impl Ctx<'_> {
    pub fn f(&self) -> Functional {
        self.functional.unwrap_or(Functional::SpectralRadius)
    }

    /// The law's functional applied to `m`.
    pub fn rho(&self, m: &NonnegMatrix) -> Result<CertifiedValue> {
        spectral::evaluate_certified(self.f(), m, &self.tol.spectral)
    }

    pub fn r(&self, m: &NonnegMatrix) -> CertifiedValue {
        spectral::certified_radius(m, &self.tol.spectral)
    }

    pub fn op2(&self, m: &NonnegMatrix) -> Result<CertifiedValue> {
        spectral::evaluate_certified(Functional::OpNorm2, m, &self.tol.spectral)
    }

    pub fn mats(&self) -> &[NonnegMatrix] {
        &self.input.matrices
    }

    pub fn weights(&self) -> &Weights {
        self.input.weights.as_ref().expect("validated weights")
    }

    pub fn grid_bundle(&self) -> Result<GridBundle> {
        constructions::grid_bundle(&self.input.grid_rows(), self.weights())
    }

    pub fn alpha(&self) -> f64 {
        self.input.exponents.alpha.expect("validated alpha")
    }

    pub fn beta(&self) -> f64 {
        self.input.exponents.beta.expect("validated beta")
    }

    pub fn t(&self) -> f64 {
        self.input.exponents.t.expect("validated t")
    }

    pub fn m(&self) -> usize {
        self.input.exponents.m.expect("validated m")
    }

    pub fn l(&self) -> usize {
        self.input.exponents.l.expect("validated l")
    }

    pub fn mix(&self) -> f64 {
        self.input.exponents.mix.expect("validated mix")
    }

    pub fn tau(&self) -> &Permutation {
        self.input.tau.as_ref().expect("validated tau")
    }

    pub fn nu(&self) -> &Permutation {
        self.input.nu.as_ref().expect("validated nu")
    }

    /// Label with the functional's name in place of `ρ`.
    pub fn label(&self, s: &str) -> String {
        s.replace('ρ', self.f().short_name())
    }
}

enum Term {
    Scalar(CertifiedValue),
    Matrix(NonnegMatrix),
}

/// Builder for the terms and links of one law evaluation.
#[derive(Default)]
pub struct Chain {
    labels: Vec<String>,
    terms: Vec<Term>,
    links: Vec<(usize, usize)>,
}

impl Chain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn scalar(&mut self, label: impl Into<String>, v: CertifiedValue) -> usize {
        self.labels.push(label.into());
        self.terms.push(Term::Scalar(v));
        self.terms.len() - 1
    }

    pub fn matrix(&mut self, label: impl Into<String>, m: NonnegMatrix) -> usize {
        self.labels.push(label.into());
        self.terms.push(Term::Matrix(m));
        self.terms.len() - 1
    }

    /// Asserts `term[from] <= term[to]`.
    pub fn link(&mut self, from: usize, to: usize) {
        self.links.push((from, to));
    }

    /// Links every term to its successor within `first..=last`.
    pub fn link_run(&mut self, first: usize, last: usize) {
        for i in first..last {
            self.link(i, i + 1);
        }
    }

    /// Scalar terms linked in order.
    pub fn from_values(items: Vec<(String, CertifiedValue)>) -> Self {
        let mut c = Chain::new();
        for (label, v) in items {
            c.scalar(label, v);
        }
        let n = c.terms.len();
        if n > 1 {
            c.link_run(0, n - 1);
        }
        c
    }

    fn finish(self, law_id: &str, functional: Option<Functional>, tol: &Tolerances) -> Result<LawReport> {
        let mut values = Vec::with_capacity(self.terms.len());
        let mut widths = Vec::with_capacity(self.terms.len());
        let mut converged = true;
        for t in &self.terms {
            match t {
                Term::Scalar(v) => {
                    values.push(v.value);
                    widths.push(v.width().max(0.0));
                    converged &= v.converged;
                }
                Term::Matrix(m) => {
                    values.push(m.max_entry());
                    widths.push(0.0);
                }
            }
        }
        let mut links = Vec::with_capacity(self.links.len());
        for &(from, to) in &self.links {
            let link = match (&self.terms[from], &self.terms[to]) {
                (Term::Scalar(a), Term::Scalar(b)) => {
                    let width = widths[from] + widths[to];
                    let mut l = Link {
                        from,
                        to,
                        kind: LinkKind::Scalar,
                        lhs: a.value,
                        rhs: b.value,
                        width,
                        worst_gap: a.value - b.value,
                        worst_index: None,
                        rhs_scale: None,
                        holds: false,
                    };
                    l.holds = l.holds_under(tol.rtol, tol.atol);
                    l
                }
                (Term::Matrix(a), Term::Matrix(b)) => {
                    let cmp = entrywise_leq(a, b, tol.slack())?;
                    Link {
                        from,
                        to,
                        kind: LinkKind::Entrywise,
                        lhs: cmp.critical.0,
                        rhs: cmp.critical.1,
                        width: 0.0,
                        worst_gap: cmp.worst_gap,
                        worst_index: Some(cmp.worst_index),
                        rhs_scale: Some(b.max_entry()),
                        holds: cmp.holds,
                    }
                }
                _ => return Err(Error::InvalidArgument("link between a matrix and a scalar".into())),
            };
            links.push(link);
        }
        let failing_link = links.iter().position(|l| !l.holds);
        Ok(LawReport {
            law_id: law_id.into(),
            functional,
            labels: self.labels,
            slack_used: widths.iter().sum(),
            values,
            widths,
            links,
            verdict: if failing_link.is_some() { Verdict::Fail } else { Verdict::Pass },
            failing_link,
            rtol: tol.rtol,
            atol: tol.atol,
            converged,
        })
    }
}

fn mismatch(law: &LawSpec, reason: impl Into<String>) -> Error {
    Error::InputShapeMismatch { law: law.id.into(), reason: reason.into() }
}

/// Largest matrix power accepted for `t`, `m`, `l`.
pub const MAX_POWER: usize = 64;

/// Checks `input` against the law's input shape and functional set.
pub fn validate_input(law: &LawSpec, input: &LawInput) -> Result<()> {
    let shape = &law.shape;
    match (law.mode, input.functional) {
        (Mode::Entrywise, Some(f)) => return Err(mismatch(law, format!("entrywise law takes no functional, got {f}"))),
        (Mode::ScalarChain, None) => return Err(mismatch(law, "a functional is required")),
        (Mode::ScalarChain, Some(f)) if !law.admits(f, input) => {
            return Err(mismatch(law, format!("functional {f} is not admissible")));
        }
        _ => {}
    }

    let mats = &input.matrices;
    let first = mats.first().ok_or_else(|| mismatch(law, "no matrices"))?;
    if let Some(k) = mats.iter().find(|k| k.dim() != first.dim()) {
        return Err(mismatch(law, format!("dimension {} differs from {}", k.dim(), first.dim())));
    }
    let count = mats.len();
    let weighted = match shape.matrices {
        Matrices::Exactly(k) => {
            if count != k {
                return Err(mismatch(law, format!("expected {k} matrices, got {count}")));
            }
            0
        }
        Matrices::List => count,
        Matrices::Grid => {
            let g = input.grid.ok_or_else(|| mismatch(law, "grid dimensions missing"))?;
            if g.rows == 0 || g.cols == 0 || g.rows * g.cols != count {
                return Err(mismatch(law, format!("grid {}×{} does not hold {count} matrices", g.rows, g.cols)));
            }
            g.cols
        }
        Matrices::Pairs => {
            if count % 2 == 1 {
                return Err(mismatch(law, "expected an even number of matrices"));
            }
            0
        }
        Matrices::Family { min, max } => {
            if count < min || count > max {
                return Err(mismatch(law, format!("expected between {min} and {max} matrices, got {count}")));
            }
            0
        }
        Matrices::BaseWithDiagonals => {
            if count != 1 {
                return Err(mismatch(law, "expected one base matrix"));
            }
            let ds =
                input.diag_perturbations.as_ref().ok_or_else(|| mismatch(law, "diagonal perturbations missing"))?;
            if ds.is_empty() {
                return Err(mismatch(law, "no diagonal perturbations"));
            }
            for d in ds {
                if d.len() != first.dim() {
                    return Err(mismatch(law, "perturbation length differs from the dimension"));
                }
                for (i, x) in d.iter().enumerate() {
                    if !x.is_finite() || first.get(i, i) + x < 0.0 {
                        return Err(mismatch(law, "perturbed matrix has a negative diagonal entry"));
                    }
                }
            }
            ds.len()
        }
    };
    if shape.matrices != Matrices::Grid && input.grid.is_some() {
        return Err(mismatch(law, "grid dimensions given for a non-grid law"));
    }
    if shape.matrices != Matrices::BaseWithDiagonals && input.diag_perturbations.is_some() {
        return Err(mismatch(law, "diagonal perturbations given for a law without them"));
    }
    match shape.parity {
        Parity::Any => {}
        Parity::Even if count % 2 == 1 => return Err(Error::OddM(count)),
        Parity::Odd if count.is_multiple_of(2) => {
            return Err(mismatch(law, format!("expected an odd number of matrices, got {count}")))
        }
        _ => {}
    }

    match (shape.weights, &input.weights) {
        (WeightRule::None, None) => {}
        (WeightRule::None, Some(_)) => return Err(mismatch(law, "weights given for a law without weights")),
        (_, None) => return Err(mismatch(law, "weights missing")),
        (rule, Some(w)) => {
            if w.len() != weighted {
                return Err(mismatch(law, format!("expected {weighted} weights, got {}", w.len())));
            }
            if rule == WeightRule::Convex && !w.is_convex() {
                return Err(Error::WeightsNotConvex(w.sum()));
            }
            if rule == WeightRule::SuperUnit && !w.is_super_unit() {
                return Err(Error::WeightsTooSmall(w.sum()));
            }
        }
    }

    let perm_ok = |p: &Option<Permutation>, name: &str| -> Result<()> {
        match p {
            Some(p) if p.len() == count => Ok(()),
            Some(p) => Err(mismatch(law, format!("{name} has length {}, expected {count}", p.len()))),
            None => {
                Err(if name == "ν" { Error::MissingPermutation } else { mismatch(law, format!("{name} missing")) })
            }
        }
    };
    match shape.perms {
        PermRule::None => {
            if input.tau.is_some() || input.nu.is_some() {
                return Err(mismatch(law, "permutations given for a law without them"));
            }
        }
        PermRule::Tau => {
            perm_ok(&input.tau, "τ")?;
            if input.nu.is_some() {
                return Err(mismatch(law, "ν given for a law that only takes τ"));
            }
        }
        PermRule::TauNu => {
            perm_ok(&input.tau, "τ")?;
            perm_ok(&input.nu, "ν")?;
        }
    }

    validate_exponents(law, input, count)?;

    if shape.filter == Some(Filter::ZeroDiagonalMean) {
        let bundle = constructions::grid_bundle(&input.grid_rows(), input.weights.as_ref().expect("checked"))?;
        let mean = constructions::weighted_gmean(&bundle.h_list, &bundle.weights)?;
        if mean.diag().iter().any(|&d| d != 0.0) {
            return Err(mismatch(law, "the weighted mean of the column products has a nonzero diagonal"));
        }
    }
    Ok(())
}

fn validate_exponents(law: &LawSpec, input: &LawInput, count: usize) -> Result<()> {
    let rule = &law.shape.exponents;
    let e = &input.exponents;
    let need = |on: bool, present: bool, name: &str| -> Result<()> {
        if on && !present {
            Err(mismatch(law, format!("exponent {name} missing")))
        } else if !on && present {
            Err(mismatch(law, format!("exponent {name} is not used by this law")))
        } else {
            Ok(())
        }
    };
    need(rule.t, e.t.is_some(), "t")?;
    need(rule.m, e.m.is_some(), "m")?;
    need(rule.l, e.l.is_some(), "l")?;
    need(rule.mix, e.mix.is_some(), "mix")?;
    need(rule.depth, e.depth.is_some(), "depth")?;
    need(rule.grid_points, e.grid_points.is_some(), "grid_points")?;
    need(rule.alpha != AlphaDomain::None, e.alpha.is_some(), "alpha")?;
    match rule.beta {
        BetaDomain::None => need(false, e.beta.is_some(), "beta")?,
        BetaDomain::SumAtLeastOne => need(true, e.beta.is_some(), "beta")?,
        BetaDomain::Optional => {}
    }

    if let Some(t) = e.t {
        if !(t.is_finite() && t >= 1.0 && t <= MAX_POWER as f64) {
            return Err(mismatch(law, format!("t = {t} must lie in [1, {MAX_POWER}]")));
        }
    }
    for (v, name) in [(e.m, "m"), (e.l, "l")] {
        if let Some(v) = v {
            if v == 0 || v > MAX_POWER {
                return Err(mismatch(law, format!("{name} = {v} must lie in [1, {MAX_POWER}]")));
            }
        }
    }
    if let (Some(m), Some(l)) = (e.m, e.l) {
        if m * l > MAX_POWER {
            return Err(mismatch(law, format!("m·l = {} exceeds {MAX_POWER}", m * l)));
        }
    }
    if let Some(x) = e.mix {
        if !(0.0..=1.0).contains(&x) {
            return Err(mismatch(law, format!("mix = {x} must lie in [0, 1]")));
        }
    }
    if let Some(d) = e.depth {
        if d > constructions::MAX_DEPTH {
            return Err(Error::DepthOverflow(d));
        }
    }
    if let Some(g) = e.grid_points {
        if g < 3 || g % 2 == 0 {
            return Err(mismatch(law, format!("grid size {g} must be odd and at least 3")));
        }
    }
    if let Some(a) = e.alpha {
        let ok = a.is_finite()
            && match rule.alpha {
                AlphaDomain::None => true,
                AlphaDomain::Unit => (0.0..=1.0).contains(&a),
                AlphaDomain::AtLeast(c) => a >= c,
                AlphaDomain::AtLeastPerMatrix(c) => a >= c / count as f64,
                AlphaDomain::Nonnegative => a >= 0.0,
            };
        if !ok {
            return Err(Error::ExponentDomain { alpha: a, beta: e.beta.unwrap_or(f64::NAN) });
        }
    }
    if let Some(b) = e.beta {
        let a = e.alpha.unwrap_or(0.0);
        if !(b.is_finite() && b >= 0.0 && a + b >= 1.0 - crate::matrix::WEIGHT_SUM_TOL) {
            return Err(Error::ExponentDomain { alpha: a, beta: b });
        }
    }
    Ok(())
}

/// Validates `input` and evaluates the law's chain.
pub fn evaluate_law(id: &str, input: &LawInput, tol: &Tolerances) -> Result<LawReport> {
    let law = find_law(id)?;
    evaluate_spec(&law, input, tol)
}

/// As [`evaluate_law`] for a spec that need not be in the catalog.
pub fn evaluate_spec(law: &LawSpec, input: &LawInput, tol: &Tolerances) -> Result<LawReport> {
    tol.validate()?;
    validate_input(law, input)?;
    let ctx = Ctx { input, functional: input.functional, tol: *tol };
    let chain = (law.eval)(&ctx)?;
    chain.finish(law.id, input.functional, tol)
}
