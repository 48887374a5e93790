//! JSON artifacts with canonical formatting.
//!
//! Keys are emitted in sorted order and every float with 17 significant digits, so
//! equal values always serialize to identical bytes.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::bloch::BlochVector;
use crate::design::{ConicalDesign, VerificationReport};
use crate::error::{Error, Result};
use crate::operator::{c, CMatrix, HermitianOperator};
use crate::polytope::{validate_projector, DesignProjector, SearchResult};
use crate::werner::{DecompositionFlags, DecompositionReport, Family, Target};

/// Row-major `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Canonical JSON text of `value`, newline-terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // going through Value sorts every object's keys
    let tree: Value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    tree.serialize(&mut ser)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn encode_matrix(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|col| [m[(r, col)].re, m[(r, col)].im])
                .collect()
        })
        .collect()
}

pub fn decode_matrix(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("matrix must be square and non-empty".into()));
    }
    Ok(CMatrix::from_fn(n, n, |r, col| {
        c(rows[r][col][0], rows[r][col][1])
    }))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignMetadata {
    pub generator: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub dimension: usize,
    #[serde(default)]
    pub kind: Option<String>,
    pub operators: Vec<MatrixJson>,
    pub metadata: DesignMetadata,
}

impl DesignFile {
    pub fn from_design(
        design: &ConicalDesign,
        kind: Option<&str>,
        metadata: DesignMetadata,
    ) -> Self {
        Self {
            dimension: design.dim(),
            kind: kind.map(str::to_owned),
            operators: design
                .elements()
                .iter()
                .map(|a| encode_matrix(a.matrix()))
                .collect(),
            metadata,
        }
    }

    /// Decodes and validates the operators (square, `d × d`, Hermitian, PSD).
    pub fn to_design(&self) -> Result<ConicalDesign> {
        let elements = self
            .operators
            .iter()
            .enumerate()
            .map(|(j, rows)| {
                let m = decode_matrix(rows)?;
                if m.nrows() != self.dimension {
                    return Err(Error::Dimension(format!(
                        "operator {j} is {0}x{0}, file declares dimension {1}",
                        m.nrows(),
                        self.dimension
                    )));
                }
                HermitianOperator::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        ConicalDesign::new(elements)
    }
}

pub fn load_design_file(path: impl AsRef<Path>) -> Result<DesignFile> {
    read_json(path)
}

pub fn save_design_file(path: impl AsRef<Path>, file: &DesignFile) -> Result<()> {
    write_json(path, file)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorFile {
    pub m: usize,
    pub dimension: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl ProjectorFile {
    pub fn from_matrix(p: &DMatrix<f64>, d: usize) -> Self {
        Self {
            m: p.nrows(),
            dimension: d,
            matrix: (0..p.nrows())
                .map(|r| p.row(r).iter().copied().collect())
                .collect(),
        }
    }

    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        if self.matrix.len() != self.m || self.matrix.iter().any(|r| r.len() != self.m) {
            return Err(Error::Parse(format!(
                "projector matrix must be {0}x{0}",
                self.m
            )));
        }
        Ok(DMatrix::from_fn(self.m, self.m, |r, col| {
            self.matrix[r][col]
        }))
    }

    pub fn validate(&self, tol: f64) -> Result<DesignProjector> {
        validate_projector(&self.matrix()?, self.dimension, tol)
    }
}

/// Search output with the witness in Gell-Mann coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResultFile {
    pub dimension: usize,
    pub m: usize,
    pub best_kappa: f64,
    pub floor: f64,
    pub witness: Vec<Vec<f64>>,
    pub witness_residual: f64,
    pub restarts_run: usize,
    pub best_per_restart: Vec<f64>,
    pub seed: u64,
}

impl SearchResultFile {
    pub fn from_result(r: &SearchResult) -> Self {
        Self {
            dimension: r.witness.first().map_or(0, BlochVector::dim),
            m: r.witness.len(),
            best_kappa: r.best_kappa,
            floor: r.floor,
            witness: r.witness.iter().map(BlochVector::coefficients).collect(),
            witness_residual: r.witness_residual,
            restarts_run: r.restarts_run,
            best_per_restart: r
                .iterations
                .iter()
                .map(|t| t.best_kappa.last().copied().unwrap_or(f64::NAN))
                .collect(),
            seed: r.seed,
        }
    }

    pub fn witness_vectors(&self) -> Result<Vec<BlochVector>> {
        self.witness
            .iter()
            .map(|c| BlochVector::from_coefficients(self.dimension, c))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetJson {
    pub family: String,
    pub d: usize,
    pub parameter: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagsJson {
    pub homogeneous: bool,
    pub pure: bool,
    pub ideal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub weights: Vec<f64>,
    pub states: Vec<MatrixJson>,
    pub target: TargetJson,
    pub residual: f64,
    pub flags: FlagsJson,
    pub source: String,
}

impl DecompositionFile {
    pub fn from_report(r: &DecompositionReport) -> Self {
        Self {
            weights: r.weights.clone(),
            states: r.states.iter().map(|s| encode_matrix(s.matrix())).collect(),
            target: TargetJson {
                family: r.target.family().as_str().into(),
                d: r.target.dim(),
                parameter: r.target.parameter(),
            },
            residual: r.residual,
            flags: FlagsJson {
                homogeneous: r.flags.homogeneous,
                pure: r.flags.pure,
                ideal: r.flags.ideal,
            },
            source: r.source.clone(),
        }
    }

    pub fn to_report(&self) -> Result<DecompositionReport> {
        let family: Family = self.target.family.parse()?;
        Ok(DecompositionReport {
            weights: self.weights.clone(),
            states: self
                .states
                .iter()
                .map(|s| HermitianOperator::new(decode_matrix(s)?))
                .collect::<Result<_>>()?,
            target: Target::new(family, self.target.d, self.target.parameter)?,
            residual: self.residual,
            flags: DecompositionFlags {
                homogeneous: self.flags.homogeneous,
                pure: self.flags.pure,
                ideal: self.flags.ideal,
            },
            source: self.source.clone(),
        })
    }
}

/// JSON rendering of a verification report.
pub fn verification_json(report: &VerificationReport) -> Result<String> {
    to_canonical_json(report)
}
