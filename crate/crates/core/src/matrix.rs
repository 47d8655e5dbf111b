//! Dense nonnegative square matrices and the Hadamard (entrywise) calculus.
//!
//! Every [`NonnegMatrix`] is validated when it is built: entries are finite
//! and nonnegative and the shape is square. Operations that could leave the
//! finite range of `f64` report [`Error::Overflow`] instead of producing an
//! invalid matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square matrix with finite nonnegative entries, stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct NonnegMatrix {
    n: usize,
    data: Vec<f64>,
}

impl NonnegMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::NonSquare { row: i + 1, len: row.len(), expected: n });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(n, data)
    }

    /// Builds a matrix from `n * n` row-major entries.
    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if data.len() != n * n {
            return Err(Error::LengthMismatch { left: data.len(), right: n * n });
        }
        for (idx, &v) in data.iter().enumerate() {
            let (row, col) = (idx / n + 1, idx % n + 1);
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row, col });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row, col, value: v });
            }
        }
        Ok(Self { n, data })
    }

    /// Internal constructor for results of closed operations; checks only finiteness.
    fn from_computed(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn ones(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self { n, data: vec![1.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n]).expect("identity is valid")
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self::from_vec(n, data)
    }

    /// Permutation matrix with a 1 at `(i, p(i))` for every row `i`.
    pub fn permutation(p: &Permutation) -> Self {
        let n = p.len();
        let mut data = vec![0.0; n * n];
        for (i, &j) in p.image().iter().enumerate() {
            data[i * n + j] = 1.0;
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(i, j)`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    /// Entrywise product `a(i,j) * b(i,j)`.
    pub fn hadamard_product(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect();
        Self::from_computed(self.n, data)
    }

    /// Entrywise power `a(i,j)^t`, with `0^0 = 1`.
    pub fn hadamard_power(&self, t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeExponent(t));
        }
        if t == 1.0 {
            return Ok(self.clone());
        }
        let data = self.data.iter().map(|&a| a.powf(t)).collect();
        Self::from_computed(self.n, data)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            let out = &mut data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for (o, b) in out.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    *o += a * b;
                }
            }
        }
        Self::from_computed(n, data)
    }

    /// `A^k` by repeated squaring.
    pub fn matpow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = k;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.matmul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.matmul(&base)?;
        }
        Ok(result.expect("k >= 1"))
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { n, data }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::from_computed(self.n, data)
    }

    /// Multiplies every entry by `c >= 0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidArgument(format!("scale factor {c} must be nonnegative")));
        }
        Self::from_computed(self.n, self.data.iter().map(|a| a * c).collect())
    }

    /// Largest entry, the max-entry norm.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_row_sum(&self) -> f64 {
        self.data.chunks(self.n).map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_col_sum(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self.get(i, j)).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * self.get(i, j) + 0.5 * self.get(j, i);
            }
        }
        Self { n, data }
    }

    /// Removes row and column `k` (0-based). Fails on a 1×1 matrix.
    pub fn delete_index(&self, k: usize) -> Result<Self> {
        if self.n == 1 {
            return Err(Error::Empty);
        }
        let n = self.n;
        let data = (0..n)
            .filter(|&i| i != k)
            .flat_map(|i| (0..n).filter(move |&j| j != k).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(Self { n: n - 1, data })
    }

    /// Returns a copy with the 0-based entry `(i, j)` replaced by `v`.
    pub fn with_entry(&self, i: usize, j: usize, v: f64) -> Result<Self> {
        let mut data = self.data.clone();
        data[i * self.n + j] = v;
        Self::from_vec(self.n, data)
    }

    /// Applies `f` to every entry; the result is validated.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_vec(self.n, self.data.iter().map(|&v| f(v)).collect())
    }

    /// `P A Pᵀ`, i.e. entry `(p(i), p(j))` of the result is `a(i, j)`.
    pub fn permute(&self, p: &Permutation) -> Result<Self> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: p.len() });
        }
        let n = self.n;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[p.apply(i) * n + p.apply(j)] = self.get(i, j);
            }
        }
        Ok(Self { n, data })
    }
}

impl fmt::Debug for NonnegMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for NonnegMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(&rows)
    }
}

impl From<NonnegMatrix> for Vec<Vec<f64>> {
    fn from(m: NonnegMatrix) -> Self {
        m.to_rows()
    }
}

/// `Σ c_i M_i` with nonnegative coefficients.
pub fn linear_comb(coeffs: &[f64], mats: &[NonnegMatrix]) -> Result<NonnegMatrix> {
    if coeffs.len() != mats.len() {
        return Err(Error::LengthMismatch { left: coeffs.len(), right: mats.len() });
    }
    let first = mats.first().ok_or(Error::EmptyList)?;
    let n = first.dim();
    let mut data = vec![0.0; n * n];
    for (&c, m) in coeffs.iter().zip(mats) {
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidArgument(format!("coefficient {c} must be nonnegative")));
        }
        first.check_dim(m)?;
        for (d, v) in data.iter_mut().zip(m.as_slice()) {
            *d += c * v;
        }
    }
    NonnegMatrix::from_computed(n, data)
}

/// Entrywise sum of a nonempty list.
pub fn sum(mats: &[NonnegMatrix]) -> Result<NonnegMatrix> {
    linear_comb(&vec![1.0; mats.len()], mats)
}

/// Ordered product `M_1 M_2 ⋯ M_k` of a nonempty list.
pub fn product<'a, I>(mats: I) -> Result<NonnegMatrix>
where
    I: IntoIterator<Item = &'a NonnegMatrix>,
{
    let mut it = mats.into_iter();
    let mut acc = it.next().ok_or(Error::EmptyList)?.clone();
    for m in it {
        acc = acc.matmul(m)?;
    }
    Ok(acc)
}

/// Slack used for entrywise comparisons: `a <= b * (1 + rtol) + atol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12 }
    }
}

impl Slack {
    pub const EXACT: Slack = Slack { rtol: 0.0, atol: 0.0 };

    #[inline]
    pub fn allows(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs * (1.0 + self.rtol) + self.atol
    }
}

/// Outcome of an entrywise comparison `A <= B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrywiseComparison {
    pub holds: bool,
    /// `max (a(i,j) - b(i,j))`; nonpositive when `A <= B` exactly.
    pub worst_gap: f64,
    /// 1-based index of `worst_gap`.
    pub worst_index: (usize, usize),
    /// The entry pair that came closest to violating the slack.
    pub critical: (f64, f64),
}

pub fn entrywise_leq(a: &NonnegMatrix, b: &NonnegMatrix, slack: Slack) -> Result<EntrywiseComparison> {
    a.check_dim(b)?;
    let n = a.dim();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_index = (1, 1);
    let mut excess = f64::NEG_INFINITY;
    let mut critical = (a.data[0], b.data[0]);
    for (idx, (&x, &y)) in a.data.iter().zip(&b.data).enumerate() {
        let gap = x - y;
        if gap > worst_gap {
            worst_gap = gap;
            worst_index = (idx / n + 1, idx % n + 1);
        }
        let e = x - (y * (1.0 + slack.rtol) + slack.atol);
        if e > excess {
            excess = e;
            critical = (x, y);
        }
    }
    Ok(EntrywiseComparison { holds: slack.allows(critical.0, critical.1), worst_gap, worst_index, critical })
}

/// A permutation of `{0, .., n-1}`, serialized 1-based.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect() }
    }

    /// From a 0-based image list.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Self { image })
    }

    /// From a 1-based image list.
    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidPermutation("indices are 1-based".into()));
        }
        Self::new(image.iter().map(|i| i - 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.image.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_based())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_one_based(&v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_based()
    }
}

/// Exponent vector `(α_1, .., α_n)` with its sum `s_n` and the rescaled
/// weights `β_i = α_i / s_n`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weights {
    alphas: Vec<f64>,
    sum: f64,
    betas: Vec<f64>,
}

/// Tolerance on `s_n` when deciding whether weights are convex.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

impl Weights {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidWeights("empty".into()));
        }
        if let Some(a) = alphas.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(Error::InvalidWeights(format!("weight {a} is not a finite nonnegative number")));
        }
        let sum: f64 = alphas.iter().sum();
        let betas = if sum > 0.0 { alphas.iter().map(|a| a / sum).collect() } else { vec![0.0; alphas.len()] };
        Ok(Self { alphas, sum, betas })
    }

    /// `n` equal weights summing to one.
    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n]).expect("valid weights")
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// `s_n`.
    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// `β_i = α_i / s_n`.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    /// Exponent `s_n - 1` of the rescaling factor `M^{s_n - 1}`.
    pub fn beta_scale_exponent(&self) -> f64 {
        self.sum - 1.0
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn is_convex(&self) -> bool {
        (self.sum - 1.0).abs() <= WEIGHT_SUM_TOL
    }

    pub fn is_super_unit(&self) -> bool {
        self.sum >= 1.0 - WEIGHT_SUM_TOL
    }

    /// The convex weights `(β_1, .., β_n)`.
    pub fn normalized(&self) -> Weights {
        Weights::new(self.betas.clone()).expect("betas are valid weights")
    }
}

impl fmt::Debug for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weights{:?}", self.alphas)
    }
}

impl TryFrom<Vec<f64>> for Weights {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Weights> for Vec<f64> {
    fn from(w: Weights) -> Self {
        w.alphas
    }
}
