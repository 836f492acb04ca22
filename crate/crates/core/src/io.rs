//! Canonical JSON-shaped serialization: field specs, elements as flat base-p
//! coordinate lists (little-endian by degree, inner extension first), row-major
//! matrices, profiles, code files, and received words with null erasures.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeProfile, Variant};
use crate::constructions::{
    BandMap, ConstructedCode, ConstructionCertificate, Family, ParityCheck,
};
use crate::field::{Element, FieldError, FieldSpec, FieldTower};
use crate::matrix::{FMatrix, MatrixError};

#[derive(Error, Debug)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no tower level has coordinate length {0}")]
    UnknownLevel(usize),
    #[error("reserved field must be null: {0}")]
    ReservedField(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Code(#[from] crate::code::CodeError),
}

/// Matrix with its field spec; entries are full-length prime coordinates at
/// the matrix level, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub field: FieldSpec,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<u64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &FMatrix) -> Self {
        MatrixFile {
            field: m.tower().spec().clone(),
            rows: m.rows(),
            cols: m.cols(),
            entries: (0..m.rows())
                .flat_map(|i| (0..m.cols()).map(move |j| m.get(i, j).coords().to_vec()))
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<FMatrix, IoError> {
        let tower = Arc::new(FieldTower::new(self.field.clone())?);
        let level = match self.entries.first() {
            Some(e) => tower
                .level_of_coord_len(e.len())
                .ok_or(IoError::UnknownLevel(e.len()))?,
            None => tower.top_level(),
        };
        let elems = self
            .entries
            .iter()
            .map(|c| tower.element(level, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FMatrix::new(tower, level, self.rows, self.cols, elems)?)
    }
}

/// Profile serialization: flat variants carry (k, r, h, delta), hierarchical
/// ones the full six-tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ProfileRepr {
    DataLocal {
        k: usize,
        r: usize,
        h: usize,
        delta: usize,
    },
    Local {
        k: usize,
        r: usize,
        h: usize,
        delta: usize,
    },
    Hdl {
        k: usize,
        r1: usize,
        r2: usize,
        h1: usize,
        h2: usize,
        delta: usize,
    },
    Hl {
        k: usize,
        r1: usize,
        r2: usize,
        h1: usize,
        h2: usize,
        delta: usize,
    },
}

impl From<&CodeProfile> for ProfileRepr {
    fn from(p: &CodeProfile) -> Self {
        match p.variant {
            Variant::DataLocal => ProfileRepr::DataLocal {
                k: p.k,
                r: p.r(),
                h: p.h(),
                delta: p.delta,
            },
            Variant::Local => ProfileRepr::Local {
                k: p.k,
                r: p.r(),
                h: p.h(),
                delta: p.delta,
            },
            Variant::Hdl => ProfileRepr::Hdl {
                k: p.k,
                r1: p.r1,
                r2: p.r2,
                h1: p.h1,
                h2: p.h2,
                delta: p.delta,
            },
            Variant::Hl => ProfileRepr::Hl {
                k: p.k,
                r1: p.r1,
                r2: p.r2,
                h1: p.h1,
                h2: p.h2,
                delta: p.delta,
            },
        }
    }
}

impl ProfileRepr {
    pub fn to_profile(&self) -> Result<CodeProfile, IoError> {
        Ok(match *self {
            ProfileRepr::DataLocal { k, r, h, delta } => CodeProfile::data_local(k, r, h, delta)?,
            ProfileRepr::Local { k, r, h, delta } => CodeProfile::local(k, r, h, delta)?,
            ProfileRepr::Hdl {
                k,
                r1,
                r2,
                h1,
                h2,
                delta,
            } => CodeProfile::hdl(k, r1, r2, h1, h2, delta)?,
            ProfileRepr::Hl {
                k,
                r1,
                r2,
                h1,
                h2,
                delta,
            } => CodeProfile::hl(k, r1, r2, h1, h2, delta)?,
        })
    }
}

/// Serialized constructed code: profile, matrix, band map, certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub family: Family,
    pub profile: ProfileRepr,
    pub matrix: MatrixFile,
    pub bands: BandMap,
    pub certificate: ConstructionCertificate,
}

impl CodeFile {
    pub fn from_constructed(c: &ConstructedCode) -> Self {
        CodeFile {
            family: c.code.family,
            profile: (&c.code.profile).into(),
            matrix: MatrixFile::from_matrix(&c.code.matrix),
            bands: c.code.bands.clone(),
            certificate: c.certificate.clone(),
        }
    }

    pub fn to_parity_check(&self) -> Result<ParityCheck, IoError> {
        Ok(ParityCheck {
            profile: self.profile.to_profile()?,
            matrix: self.matrix.to_matrix()?,
            bands: self.bands.clone(),
            family: self.family,
        })
    }
}

/// CLI construction descriptor; the seed field is reserved and must be null.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JobSpec {
    pub family: Family,
    pub profile: ProfileRepr,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl JobSpec {
    pub fn validate(&self) -> Result<(), IoError> {
        if self.seed.is_some() {
            return Err(IoError::ReservedField(
                "seed is reserved and must be null".into(),
            ));
        }
        Ok(())
    }
}

/// Received word: JSON list with null marking erasures, symbols as flat
/// coordinate lists.
pub fn word_to_json(word: &[Option<Element>]) -> serde_json::Value {
    serde_json::Value::Array(
        word.iter()
            .map(|w| match w {
                Some(e) => serde_json::json!(e.coords()),
                None => serde_json::Value::Null,
            })
            .collect(),
    )
}

pub fn word_from_json(
    v: &serde_json::Value,
    tower: &Arc<FieldTower>,
    level: usize,
) -> Result<Vec<Option<Element>>, IoError> {
    let arr: Vec<Option<Vec<u64>>> = serde_json::from_value(v.clone())?;
    arr.into_iter()
        .map(|w| match w {
            Some(coords) => {
                let l = tower
                    .level_of_coord_len(coords.len())
                    .ok_or(IoError::UnknownLevel(coords.len()))?;
                let e = tower.element(l, &coords)?;
                Ok(Some(tower.embed(&e, level)?))
            }
            None => Ok(None),
        })
        .collect()
}
