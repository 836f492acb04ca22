//! Parity-check constructions for hierarchical-locality MRCs: the general
//! tower construction with its algebraic certifier, the small-field families
//! (single global parity; one global and one mid parity; two global and one
//! mid parity), and the derivation of data-local codes from local ones.

mod derive;
mod general;
mod small_field;

pub use derive::derive_hdl_from_hl;
pub use general::{check_theorem2, construct_general};
pub use small_field::{
    construct_h1_1, construct_h1_1_h2_1, construct_h1_1_h2_1_over, construct_h1_2_h2_1,
};

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{verify_mrc, CodeError, CodeProfile, VerifyOptions};
use crate::field::FieldError;
use crate::kwise::KWiseError;
use crate::matrix::{FMatrix, MatrixError};

#[derive(Error, Debug)]
pub enum ConstructError {
    #[error("profile does not fit this family: {0}")]
    WrongFamily(String),
    #[error("parameter selection failed: {constraint}")]
    ParameterSelectionFailure { constraint: String },
    #[error("local block M0 restricted to the pattern is singular")]
    SingularLocalBlock,
    #[error("mid block F_i restricted to the pattern is singular")]
    SingularGammaBlock,
    #[error("constructed code failed certification: {0}")]
    CertificationFailed(String),
    #[error("input code is not a verified hierarchical-local MRC")]
    NotVerifiedInput,
    #[error("unsupported derivation case: {0}")]
    UnsupportedCase(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    KWise(#[from] KWiseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "general")]
    General,
    #[serde(rename = "h1eq1")]
    H1Eq1,
    #[serde(rename = "h11h21")]
    H11H21,
    #[serde(rename = "h12h21")]
    H12H21,
    #[serde(rename = "derived_hdl")]
    DerivedHdl,
}

/// A row/column rectangle of the parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub rows: Range<usize>,
    pub cols: Range<usize>,
}

/// Row bands of the parity-check matrix: one local band per local group, one
/// mid band per mid group, one global band; plus the tower level each band's
/// entries live in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandMap {
    pub local: Vec<((usize, usize), Band)>,
    pub mid: Vec<(usize, Band)>,
    pub global: Option<Band>,
    pub local_level: usize,
    pub mid_level: usize,
    pub global_level: usize,
}

/// A structured parity-check matrix with its profile and band map.
#[derive(Clone)]
pub struct ParityCheck {
    pub profile: CodeProfile,
    pub matrix: FMatrix,
    pub bands: BandMap,
    pub family: Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertMethod {
    Theorem2Conditions,
    ExhaustiveRank,
}

/// How a construction was certified, with enough data to replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionCertificate {
    pub method: CertMethod,
    pub checks: u64,
    pub notes: Vec<String>,
}

pub struct ConstructedCode {
    pub code: ParityCheck,
    pub certificate: ConstructionCertificate,
}

impl ParityCheck {
    /// Scan test: zeros outside the declared bands, and band entries resident
    /// in the declared subfield levels.
    pub fn validate(&self) -> Result<(), ConstructError> {
        let h = &self.matrix;
        let t = h.tower();
        let p = &self.profile;
        if h.cols() != p.n || h.rows() != p.parity_rows() {
            return Err(ConstructError::CertificationFailed(format!(
                "matrix is {}x{}, profile needs {}x{}",
                h.rows(),
                h.cols(),
                p.parity_rows(),
                p.n
            )));
        }
        let mut owner: Vec<Option<(Range<usize>, usize)>> = vec![None; h.rows()];
        for ((_, _), band) in &self.bands.local {
            for r in band.rows.clone() {
                owner[r] = Some((band.cols.clone(), self.bands.local_level));
            }
        }
        for (_, band) in &self.bands.mid {
            for r in band.rows.clone() {
                owner[r] = Some((band.cols.clone(), self.bands.mid_level));
            }
        }
        if let Some(band) = &self.bands.global {
            for r in band.rows.clone() {
                owner[r] = Some((band.cols.clone(), self.bands.global_level));
            }
        }
        for (r, o) in owner.iter().enumerate() {
            let Some((cols, level)) = o else {
                return Err(ConstructError::CertificationFailed(format!(
                    "row {r} belongs to no band"
                )));
            };
            for j in 0..h.cols() {
                let e = h.get(r, j);
                if cols.contains(&j) {
                    if !t.in_subfield(e, *level) {
                        return Err(ConstructError::CertificationFailed(format!(
                            "entry ({r},{j}) leaves the level-{level} subfield"
                        )));
                    }
                } else if !t.is_zero(e) {
                    return Err(ConstructError::CertificationFailed(format!(
                        "nonzero entry ({r},{j}) outside its band"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Assemble the standard block layout shared by all the constructions:
/// per mid group, t2 copies of `m0` on the local groups followed by the mid
/// blocks; the global band underneath.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble(
    profile: &CodeProfile,
    family: Family,
    m0: &FMatrix,
    mid_block: &dyn Fn(usize) -> FMatrix,
    global_block: &dyn Fn(usize, usize) -> FMatrix,
    local_level: usize,
    mid_level: usize,
    global_level: usize,
) -> Result<ParityCheck, ConstructError> {
    let p = profile;
    let tower = m0.tower().clone();
    let top = global_level.max(mid_level).max(local_level);
    let band_rows = p.t2 * p.delta + p.h2;
    let mut h = FMatrix::zeros(tower.clone(), top, p.parity_rows(), p.n);
    let mut bands = BandMap {
        local: Vec::new(),
        mid: Vec::new(),
        global: None,
        local_level,
        mid_level,
        global_level,
    };
    for i in 0..p.t1 {
        let r0 = i * band_rows;
        for s in 0..p.t2 {
            let cols = p.b_group(i, s);
            for r in 0..p.delta {
                for (jj, j) in cols.clone().enumerate() {
                    h.set(r0 + s * p.delta + r, j, m0.get(r, jj).clone());
                }
            }
            bands.local.push((
                (i, s),
                Band {
                    rows: r0 + s * p.delta..r0 + (s + 1) * p.delta,
                    cols,
                },
            ));
        }
        if p.h2 > 0 {
            let mid_rows = r0 + p.t2 * p.delta..r0 + band_rows;
            for s in 0..p.t2 {
                let blk = mid_block(s);
                let cols = p.b_group(i, s);
                for r in 0..p.h2 {
                    for (jj, j) in cols.clone().enumerate() {
                        h.set(mid_rows.start + r, j, blk.get(r, jj).clone());
                    }
                }
            }
            bands.mid.push((
                i,
                Band {
                    rows: mid_rows,
                    cols: p.a_group(i),
                },
            ));
        }
    }
    if p.h1 > 0 {
        let g0 = p.t1 * band_rows;
        for i in 0..p.t1 {
            for s in 0..p.t2 {
                let blk = global_block(i, s);
                let cols = p.b_group(i, s);
                for r in 0..p.h1 {
                    for (jj, j) in cols.clone().enumerate() {
                        h.set(g0 + r, j, blk.get(r, jj).clone());
                    }
                }
            }
        }
        bands.global = Some(Band {
            rows: g0..g0 + p.h1,
            cols: 0..p.n,
        });
    }
    let pc = ParityCheck {
        profile: p.clone(),
        matrix: h,
        bands,
        family,
    };
    pc.validate()?;
    Ok(pc)
}

/// Run the exhaustive verifier and wrap the outcome as a certificate.
pub(crate) fn certify_exhaustive(pc: &ParityCheck) -> Result<ConstructionCertificate, ConstructError> {
    let report = verify_mrc(&pc.matrix, &pc.profile, &VerifyOptions::default())?;
    if !report.passed {
        return Err(ConstructError::CertificationFailed(format!(
            "exhaustive verification failed after {} patterns: {:?}",
            report.patterns_checked, report.failure_witness
        )));
    }
    Ok(ConstructionCertificate {
        method: CertMethod::ExhaustiveRank,
        checks: report.patterns_checked,
        notes: Vec::new(),
    })
}

pub(crate) fn expect_hl(p: &CodeProfile, family: &str) -> Result<(), ConstructError> {
    if p.variant != crate::code::Variant::Hl {
        return Err(ConstructError::WrongFamily(format!(
            "{family} builds hierarchical local codes, got {:?}",
            p.variant
        )));
    }
    Ok(())
}
