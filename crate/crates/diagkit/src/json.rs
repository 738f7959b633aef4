//! JSON file formats. Complex numbers are `[re, im]`; plain numbers are
//! accepted on input as real values.

use diagkit_core::classify::{SequenceSpec, Tail};
use diagkit_core::frames::FramePair;
use diagkit_core::synth::{DiagonalRequest, RequestKind, Role, Truncation};
use diagkit_core::{Certificate, ComplexMatrix, OrthonormalBasis, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA: &str = "diagkit/1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cx {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Pair([f64; 2]),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Real(x) => Cx(C64::new(x, 0.0)),
            Raw::Pair([re, im]) => Cx(C64::new(re, im)),
        })
    }
}

pub fn to_cx(v: &[C64]) -> Vec<Cx> {
    v.iter().map(|z| Cx(*z)).collect()
}

pub fn from_cx(v: &[Cx]) -> Vec<C64> {
    v.iter().map(|z| z.0).collect()
}

/// Row-major matrix with a flat entry list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Cx>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows()).flat_map(|i| to_cx(&m.row(i))).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = CliError;

    fn try_from(j: &MatrixJson) -> Result<Self, CliError> {
        if j.data.len() != j.rows * j.cols {
            return Err(CliError::Input(format!(
                "{} entries do not fill the declared {}×{} shape",
                j.data.len(),
                j.rows,
                j.cols
            )));
        }
        let data = from_cx(&j.data);
        Ok(ComplexMatrix::new(j.rows, j.cols, data)?)
    }
}

/// A matrix or basis file (extra fields ignored), a file nesting one under
/// `matrix`, or a plain list of rows.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Wrapped { matrix: MatrixJson },
    Bare(MatrixJson),
    /// Plain list of rows.
    Rows(Vec<Vec<Cx>>),
}

impl MatrixInput {
    pub fn into_matrix(self) -> Result<ComplexMatrix, CliError> {
        match self {
            MatrixInput::Wrapped { matrix } | MatrixInput::Bare(matrix) => (&matrix).try_into(),
            MatrixInput::Rows(entries) => {
                let cols = entries.first().map_or(0, Vec::len);
                if entries.iter().any(|r| r.len() != cols) {
                    return Err(CliError::Input("matrix rows have different lengths".into()));
                }
                let matrix = MatrixJson { rows: entries.len(), cols, data: entries.concat() };
                (&matrix).try_into()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixFile<'a> {
    pub schema: &'static str,
    pub kind: &'static str,
    #[serde(flatten)]
    pub matrix: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub processed: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized: Option<Vec<Cx>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub roles: Option<Vec<&'a str>>,
}

impl MatrixFile<'_> {
    pub fn plain(kind: &'static str, m: &ComplexMatrix) -> Self {
        MatrixFile {
            schema: SCHEMA,
            kind,
            matrix: m.into(),
            processed: None,
            realized: None,
            roles: None,
        }
    }
}

pub fn role_name(r: Role) -> &'static str {
    match r {
        Role::Requested => "requested",
        Role::Fill => "fill",
        Role::Boundary => "boundary",
        Role::Tail => "tail",
    }
}

pub fn basis_from(m: ComplexMatrix) -> Result<OrthonormalBasis, CliError> {
    Ok(OrthonormalBasis::new(m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindJson {
    Bounded,
    AbsSummableSumOne,
    AbsSummableIntegerSum,
    MatrixExact,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestJson {
    pub values: Vec<Cx>,
    pub kind: KindJson,
    #[serde(default)]
    pub truncation: TruncationJson,
}

impl From<&RequestJson> for DiagonalRequest {
    fn from(j: &RequestJson) -> Self {
        DiagonalRequest {
            values: from_cx(&j.values),
            kind: match j.kind {
                KindJson::Bounded => RequestKind::Bounded,
                KindJson::AbsSummableSumOne => RequestKind::AbsSummableSumOne,
                KindJson::AbsSummableIntegerSum => RequestKind::AbsSummableIntegerSum,
                KindJson::MatrixExact => RequestKind::MatrixExact,
            },
            truncation: Truncation {
                blocks: j.truncation.blocks,
                partition: j.truncation.partition,
                depth: j.truncation.depth,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailJson {
    Zeros,
    Ones,
    DivergentBelowHalf,
    DivergentAboveHalf,
    ClassFlags { in_l1: bool, in_l2: bool, sup: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceJson {
    #[serde(default)]
    pub head: Vec<f64>,
    pub tail: TailJson,
}

impl TryFrom<&SequenceJson> for SequenceSpec {
    type Error = CliError;

    fn try_from(j: &SequenceJson) -> Result<Self, CliError> {
        let tail = match j.tail {
            TailJson::Zeros => Tail::Zeros,
            TailJson::Ones => Tail::Ones,
            TailJson::DivergentBelowHalf => Tail::DivergentBelowHalf,
            TailJson::DivergentAboveHalf => Tail::DivergentAboveHalf,
            TailJson::ClassFlags { in_l1, in_l2, sup } => Tail::ClassFlags { in_l1, in_l2, sup },
        };
        Ok(SequenceSpec::new(j.head.clone(), tail)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramesJson {
    pub dim: usize,
    pub x: Vec<Vec<Cx>>,
    pub y: Vec<Vec<Cx>>,
}

impl From<&FramePair> for FramesJson {
    fn from(p: &FramePair) -> Self {
        FramesJson {
            dim: p.dim,
            x: p.x.iter().map(|v| to_cx(v)).collect(),
            y: p.y.iter().map(|v| to_cx(v)).collect(),
        }
    }
}

impl TryFrom<&FramesJson> for FramePair {
    type Error = CliError;

    fn try_from(j: &FramesJson) -> Result<Self, CliError> {
        let conv = |v: &Vec<Vec<Cx>>| v.iter().map(|c| from_cx(c)).collect();
        Ok(FramePair::new(j.dim, conv(&j.x), conv(&j.y))?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateJson {
    pub idempotency_residual: f64,
    pub unitarity_residual: f64,
    pub diagonal_residual: f64,
    pub norm_bound_claimed: Option<f64>,
    pub norm_observed: f64,
    pub similarity_condition: Option<f64>,
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        CertificateJson {
            idempotency_residual: c.idempotency_residual,
            unitarity_residual: c.unitarity_residual,
            diagonal_residual: c.diagonal_residual,
            norm_bound_claimed: c.norm_bound_claimed,
            norm_observed: c.norm_observed,
            similarity_condition: c.similarity_condition,
        }
    }
}
