//! JSON and CSV file formats.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are stored row-major:
//!
//! ```json
//! {"rows": 2, "cols": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use semigroup_core::dilation::DilationCandidate;
use semigroup_core::interp::ContractionTuple;
use semigroup_core::vn::{MultiPolynomial, VnReport, DEFAULT_DEGREE_CAP};
use semigroup_core::torus::TracePoint;
use semigroup_core::{CMatrix, Tolerance, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = CliError;

    fn try_from(m: &MatrixJson) -> Result<Self, CliError> {
        let data = m.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(CMatrix::new(m.rows, m.cols, data)?)
    }
}

/// A list of square matrices of a common size, used both for contraction
/// tuples and for semigroup generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    pub d: usize,
    pub dim: usize,
    pub matrices: Vec<MatrixJson>,
}

impl TupleJson {
    pub fn from_mats(mats: &[CMatrix]) -> Self {
        TupleJson {
            d: mats.len(),
            dim: mats.first().map_or(0, |m| m.rows()),
            matrices: mats.iter().map(MatrixJson::from).collect(),
        }
    }

    /// Checks the declared `d` and `dim` against the payload.
    pub fn to_mats(&self) -> Result<Vec<CMatrix>, CliError> {
        if self.matrices.len() != self.d {
            return Err(CliError::Input(format!(
                "tuple declares d = {} but lists {} matrices",
                self.d,
                self.matrices.len()
            )));
        }
        let mats: Vec<CMatrix> = self.matrices.iter().map(CMatrix::try_from).collect::<Result<_, _>>()?;
        if let Some(m) = mats.iter().find(|m| m.rows() != self.dim || m.cols() != self.dim) {
            return Err(CliError::Input(format!(
                "tuple declares dim = {} but holds a {}x{} matrix",
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        Ok(mats)
    }

    pub fn to_tuple(&self, tol: Tolerance) -> Result<ContractionTuple, CliError> {
        Ok(ContractionTuple::new(self.to_mats()?, tol)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub d: usize,
    pub terms: Vec<TermJson>,
}

impl From<&MultiPolynomial> for PolynomialJson {
    fn from(p: &MultiPolynomial) -> Self {
        PolynomialJson {
            d: p.d(),
            terms: p
                .terms()
                .iter()
                .map(|(alpha, c)| TermJson { alpha: alpha.clone(), coeff: [c.re, c.im] })
                .collect(),
        }
    }
}

impl TryFrom<&PolynomialJson> for MultiPolynomial {
    type Error = CliError;

    fn try_from(p: &PolynomialJson) -> Result<Self, CliError> {
        let terms = p.terms.iter().map(|t| (t.alpha.clone(), C64::new(t.coeff[0], t.coeff[1])));
        Ok(MultiPolynomial::new(p.d, terms, DEFAULT_DEGREE_CAP)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateJson {
    pub unitaries: Vec<MatrixJson>,
    pub embedding: MatrixJson,
    pub n_max: usize,
}

impl From<&DilationCandidate> for CandidateJson {
    fn from(c: &DilationCandidate) -> Self {
        CandidateJson {
            unitaries: c.unitaries.iter().map(MatrixJson::from).collect(),
            embedding: MatrixJson::from(&c.embedding),
            n_max: c.n_max,
        }
    }
}

impl TryFrom<&CandidateJson> for DilationCandidate {
    type Error = CliError;

    fn try_from(c: &CandidateJson) -> Result<Self, CliError> {
        Ok(DilationCandidate {
            unitaries: c.unitaries.iter().map(CMatrix::try_from).collect::<Result<_, _>>()?,
            embedding: CMatrix::try_from(&c.embedding)?,
            n_max: c.n_max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VnReportJson {
    pub lhs: f64,
    pub grid_sup: f64,
    pub lipschitz_pad: f64,
    pub sup_upper: f64,
    pub verdict: String,
}

impl From<&VnReport> for VnReportJson {
    fn from(r: &VnReport) -> Self {
        VnReportJson {
            lhs: r.lhs,
            grid_sup: r.grid_sup,
            lipschitz_pad: r.lipschitz_pad,
            sup_upper: r.sup_upper,
            verdict: r.verdict.as_str().to_string(),
        }
    }
}

/// A tuple and polynomial shipped together, as for the violation fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VnCaseJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub tuple: TupleJson,
    pub poly: PolynomialJson,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_json_string(value)?).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    CMatrix::try_from(&read_json::<MatrixJson>(path)?)
}

pub fn read_tuple(path: &Path, tol: Tolerance) -> Result<ContractionTuple, CliError> {
    read_json::<TupleJson>(path)?.to_tuple(tol)
}

pub fn read_poly(path: &Path) -> Result<MultiPolynomial, CliError> {
    MultiPolynomial::try_from(&read_json::<PolynomialJson>(path)?)
}

/// A signal on the grid as a JSON list of `[re, im]` pairs.
pub fn read_signal(path: &Path) -> Result<Vec<C64>, CliError> {
    let pairs: Vec<[f64; 2]> = read_json(path)?;
    Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
}

/// Writes `theta,re,im` rows with a header.
pub fn write_trace_csv<W: Write>(out: W, points: &[TracePoint]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "re", "im"]).map_err(csv_err)?;
    for p in points {
        w.serialize((p.theta, p.value.re, p.value.im)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Writes `eps,sup_error` rows with a header.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[(f64, f64)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "sup_error"]).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
