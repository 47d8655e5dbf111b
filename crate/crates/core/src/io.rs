//! Matrix Market files, JSON reports and evaluation specs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::{CampaignReport, CampaignRow, Counterexample, GenConfig};
use crate::laws::{Exponents, GridDims, LawInput, LawReport, Tolerances};
use crate::matrix::{NonnegMatrix, Permutation, Weights};
use crate::spectral::Functional;

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a real or integer, general Matrix Market matrix in array or
/// coordinate format.
pub fn parse_matrix_market(text: &str) -> Result<NonnegMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix <format> real general'"));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(parse_err(1, format!("unsupported format {other:?}"))),
    };
    if words[3] != "real" && words[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field {:?}", words[3])));
    }
    if words[4] != "general" {
        return Err(parse_err(1, format!("unsupported symmetry {:?}", words[4])));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let dims = size
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_err(size_line, format!("bad size {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let expected_len = if coordinate { 3 } else { 2 };
    if dims.len() != expected_len {
        return Err(parse_err(size_line, format!("size line needs {expected_len} integers")));
    }
    let (rows, cols) = (dims[0], dims[1]);
    if rows == 0 {
        return Err(Error::Empty);
    }
    if rows != cols {
        return Err(Error::NonSquare { row: 1, len: cols, expected: rows });
    }
    let n = rows;
    let value = |line: usize, t: &str| -> Result<f64> {
        let v: f64 = t.parse().map_err(|_| parse_err(line, format!("bad number {t:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(line, format!("non-finite entry {t:?}")));
        }
        Ok(v)
    };
    let check_sign = |v: f64, i: usize, j: usize| -> Result<()> {
        if v < 0.0 {
            return Err(Error::NegativeEntry { row: i + 1, col: j + 1, value: v });
        }
        Ok(())
    };

    let mut data = vec![0.0; n * n];
    if coordinate {
        let nnz = dims[2];
        let mut seen = vec![false; n * n];
        let mut count = 0;
        for (line, l) in body {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(line, "expected 'row col value'"));
            }
            let idx = |t: &str| -> Result<usize> {
                match t.parse::<usize>() {
                    Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                    _ => Err(parse_err(line, format!("index {t:?} out of range 1..={n}"))),
                }
            };
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            let v = value(line, toks[2])?;
            check_sign(v, i, j)?;
            if std::mem::replace(&mut seen[i * n + j], true) {
                return Err(parse_err(line, format!("duplicate entry ({}, {})", i + 1, j + 1)));
            }
            data[i * n + j] = v;
            count += 1;
            if count > nnz {
                return Err(parse_err(line, format!("more than {nnz} entries")));
            }
        }
        if count != nnz {
            return Err(parse_err(size_line, format!("expected {nnz} entries, found {count}")));
        }
    } else {
        let mut k = 0;
        for (line, l) in body {
            for t in l.split_whitespace() {
                if k >= n * n {
                    return Err(parse_err(line, format!("more than {} entries", n * n)));
                }
                // Column-major order.
                let (i, j) = (k % n, k / n);
                let v = value(line, t)?;
                check_sign(v, i, j)?;
                data[i * n + j] = v;
                k += 1;
            }
        }
        if k != n * n {
            return Err(parse_err(size_line, format!("expected {} entries, found {k}", n * n)));
        }
    }
    NonnegMatrix::from_vec(n, data)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<NonnegMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?)
}

/// Array-format Matrix Market text with shortest round-trip numbers.
pub fn format_matrix_market(m: &NonnegMatrix) -> String {
    let n = m.dim();
    let mut s = format!("%%MatrixMarket matrix array real general\n{n} {n}\n");
    for j in 0..n {
        for i in 0..n {
            let _ = writeln!(s, "{:?}", m.get(i, j));
        }
    }
    s
}

pub fn save_matrix(m: &NonnegMatrix, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, format_matrix_market(m))?)
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(2 * bytes.len()), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// SHA-256 of the canonical JSON of an input.
pub fn inputs_digest(input: &LawInput) -> Result<String> {
    let canonical = serde_json::to_string(&serde_json::to_value(input)?)?;
    Ok(hex(&Sha256::digest(canonical.as_bytes())))
}

/// A law report as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub tool_version: String,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub report: LawReport,
    /// The evaluated input, present when the verdict is fail.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<LawInput>,
}

impl ReportDocument {
    pub fn new(report: LawReport, input: &LawInput, seed: Option<u64>) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            inputs_digest: inputs_digest(input)?,
            seed,
            counterexample: (!report.passed()).then(|| input.clone()),
            report,
        })
    }
}

pub fn save_report(doc: &ReportDocument, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, to_sorted_json(doc)?)?)
}

pub fn load_report(path: impl AsRef<Path>) -> Result<ReportDocument> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// A campaign report as written to disk. Wall time is not recorded so that
/// identical runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignDocument {
    pub schema_version: String,
    pub tool_version: String,
    pub seed: u64,
    pub trials: usize,
    pub config: GenConfig,
    pub tolerances: Tolerances,
    pub total_failures: usize,
    pub rows: Vec<CampaignRow>,
    pub counterexamples: Vec<Counterexample>,
}

impl CampaignDocument {
    pub fn new(report: &CampaignReport, trials: usize, config: &GenConfig, tolerances: &Tolerances) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            seed: config.seed,
            trials,
            config: *config,
            tolerances: *tolerances,
            total_failures: report.total_failures(),
            rows: report.rows.clone(),
            counterexamples: report.counterexamples.clone(),
        }
    }
}

pub fn save_campaign(doc: &CampaignDocument, path: impl AsRef<Path>) -> Result<()> {
    Ok(fs::write(path, to_sorted_json(doc)?)?)
}

pub fn load_campaign(path: impl AsRef<Path>) -> Result<CampaignDocument> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Input file for `eval`: matrix file paths (relative to the spec file)
/// plus the scalar parameters of the law.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSpec {
    pub matrices: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridDims>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Weights>,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Permutation>,
    /// 1-based.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Permutation>,
    #[serde(default)]
    pub exponents: Exponents,
    /// Short or long functional name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functional: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_perturbations: Option<Vec<Vec<f64>>>,
}

/// Reads an eval spec and the matrices it references.
pub fn load_eval_spec(path: impl AsRef<Path>) -> Result<LawInput> {
    let path = path.as_ref();
    let spec: EvalSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let matrices = spec
        .matrices
        .iter()
        .map(|p| load_matrix(if p.is_absolute() { p.clone() } else { base.join(p) }))
        .collect::<Result<Vec<_>>>()?;
    let functional = spec.functional.as_deref().map(str::parse::<Functional>).transpose()?;
    Ok(LawInput {
        matrices,
        grid: spec.grid,
        weights: spec.weights,
        tau: spec.tau,
        nu: spec.nu,
        exponents: spec.exponents,
        functional,
        diag_perturbations: spec.diag_perturbations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn array_is_column_major() {
        let a = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n").unwrap();
        assert_eq!(a, m(&[&[1.0, 2.0], &[3.0, 4.0]]));
    }

    #[test]
    fn coordinate_fills_zeros() {
        let a =
            parse_matrix_market("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 1\n1 2 5.0\n").unwrap();
        assert_eq!(a, m(&[&[0.0, 5.0], &[0.0, 0.0]]));
    }

    #[test]
    fn rejects_bad_files() {
        let neg = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1\n-1\n2\n4\n");
        assert_eq!(neg, Err(Error::NegativeEntry { row: 2, col: 1, value: -1.0 }));
        let rect = parse_matrix_market("%%MatrixMarket matrix array real general\n2 3\n1 2 3 4 5 6\n");
        assert!(matches!(rect, Err(Error::NonSquare { .. })));
        let short = parse_matrix_market("%%MatrixMarket matrix array real general\n2 2\n1 2 3\n");
        assert!(matches!(short, Err(Error::Parse { line: 2, .. })));
        let bad = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 5.0\n");
        assert!(matches!(bad, Err(Error::Parse { line: 3, .. })));
        let range = parse_matrix_market("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 5.0\n");
        assert!(matches!(range, Err(Error::Parse { line: 3, .. })));
        assert!(matches!(
            parse_matrix_market("%%MatrixMarket matrix array complex general\n1 1\n1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn matrix_round_trip() {
        let a = m(&[&[0.1, 1e-300], &[3.0, 1.0 / 3.0]]);
        assert_eq!(parse_matrix_market(&format_matrix_market(&a)).unwrap(), a);
    }

    #[test]
    fn sorted_json_keys() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
        }
        let s = to_sorted_json(&S { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}
