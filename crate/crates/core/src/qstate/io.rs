//! JSON encodings for states and bases.
//!
//! Complex numbers are `[re, im]` pairs. Mixed states are row-major:
//! `{"dim": d, "matrix": [[[re, im], ...], ...]}`; pure states are
//! `{"dim": d, "vector": [[re, im], ...]}`; bases list their vectors:
//! `{"dim": d, "vectors": [[[re, im], ...], ...]}`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Basis, CMatrix, CVector, DensityMatrix, PureState, C64};
use crate::error::{Error, Result};

pub type Pair = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub dim: usize,
    pub vector: Vec<Pair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub dim: usize,
    pub vectors: Vec<Vec<Pair>>,
}

/// Either kind of state file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Mixed(DensityMatrix),
    Pure(PureState),
}

impl LoadedState {
    pub fn density_matrix(&self) -> DensityMatrix {
        match self {
            LoadedState::Mixed(rho) => rho.clone(),
            LoadedState::Pure(psi) => psi.projector(),
        }
    }
}

fn pair(p: &Pair) -> Result<C64> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(C64::new(p[0], p[1]))
    } else {
        Err(Error::NonFinite)
    }
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn vector_from_pairs(dim: usize, pairs: &[Pair]) -> Result<CVector> {
    if pairs.len() != dim {
        return Err(Error::dims(format!(
            "declared dim {dim} but vector has {} entries",
            pairs.len()
        )));
    }
    let entries = pairs.iter().map(pair).collect::<Result<Vec<_>>>()?;
    Ok(CVector::from_vec(entries))
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.matrix.len() != self.dim || self.matrix.iter().any(|r| r.len() != self.dim) {
            return Err(Error::dims(format!(
                "declared dim {} does not match the matrix shape",
                self.dim
            )));
        }
        let entries = self
            .matrix
            .iter()
            .flatten()
            .map(pair)
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_row_slice(self.dim, self.dim, &entries))
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        MatrixFile {
            dim: rho.dim(),
            matrix: m
                .row_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl VectorFile {
    pub fn to_state(&self) -> Result<PureState> {
        PureState::new(vector_from_pairs(self.dim, &self.vector)?)
    }

    pub fn from_state(psi: &PureState) -> Self {
        VectorFile {
            dim: psi.dim(),
            vector: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl BasisFile {
    pub fn to_basis(&self) -> Result<Basis> {
        if self.vectors.len() != self.dim {
            return Err(Error::dims(format!(
                "declared dim {} but {} basis vectors",
                self.dim,
                self.vectors.len()
            )));
        }
        let cols = self
            .vectors
            .iter()
            .map(|v| vector_from_pairs(self.dim, v))
            .collect::<Result<Vec<_>>>()?;
        Basis::new(CMatrix::from_columns(&cols))
    }

    pub fn from_basis(basis: &Basis) -> Self {
        BasisFile {
            dim: basis.dim(),
            vectors: (0..basis.len())
                .map(|i| basis.vector(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Parses a mixed- or pure-state document, dispatching on the `matrix` or
/// `vector` key, and validates the result.
pub fn parse_state(text: &str) -> Result<LoadedState> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parse_state_value(value)
}

pub fn parse_state_value(value: Value) -> Result<LoadedState> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("state document must be a JSON object".into()))?;
    if obj.contains_key("matrix") {
        let file: MatrixFile = from_value(value)?;
        Ok(LoadedState::Mixed(DensityMatrix::new(file.to_matrix()?)?))
    } else if obj.contains_key("vector") {
        let file: VectorFile = from_value(value)?;
        Ok(LoadedState::Pure(file.to_state()?))
    } else {
        Err(Error::Parse(
            "state document needs a \"matrix\" or \"vector\" field".into(),
        ))
    }
}

pub fn parse_basis(text: &str) -> Result<Basis> {
    let file: BasisFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_basis()
}

pub fn density_matrix_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_state(rho)).expect("finite floats serialize")
}

pub fn pure_state_to_json(psi: &PureState) -> String {
    serde_json::to_string_pretty(&VectorFile::from_state(psi)).expect("finite floats serialize")
}
