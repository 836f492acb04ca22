//! Maximal-recoverability verification by erased-column rank checks.
//!
//! A code with the given group topology is maximally recoverable iff the
//! parity-check matrix restricted to the columns of every maximal erasure
//! pattern has full column rank n - k. This is equivalent to the punctured
//! E-set MDS conditions of the definitions; the E-set form is retained as a
//! cross-check oracle for small lengths.

use itertools::Itertools;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pattern::{enumerate_erasure_patterns, sample_pattern, ErasurePattern};
use super::profile::{CodeProfile, Variant};
use super::CodeError;
use crate::matrix::packed::PackedMatrix;
use crate::matrix::FMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub pattern: ErasurePattern,
    pub rank: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub patterns_checked: u64,
    #[serde(rename = "witness")]
    pub failure_witness: Option<FailureWitness>,
    /// True only when every maximal pattern was checked.
    #[serde(skip)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    /// Non-exhaustive smoke mode: checks `count` randomly sampled patterns.
    Sample { count: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub jobs: usize,
    pub mode: VerifyMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            jobs: 1,
            mode: VerifyMode::Exhaustive,
        }
    }
}

fn check_shape(h: &FMatrix, p: &CodeProfile) -> Result<(), CodeError> {
    if h.cols() != p.n {
        return Err(CodeError::ShapeMismatch(format!(
            "matrix has {} columns, profile length is {}",
            h.cols(),
            p.n
        )));
    }
    if h.rows() != p.parity_rows() {
        return Err(CodeError::ShapeMismatch(format!(
            "matrix has {} rows, profile expects {} parity rows",
            h.rows(),
            p.parity_rows()
        )));
    }
    Ok(())
}

/// Rank oracle over column subsets, packed when the level has tables.
enum RankOracle<'a> {
    Packed {
        ctx: crate::field::PackedCtx<'a>,
        packed: PackedMatrix,
    },
    Generic(&'a FMatrix),
}

impl<'a> RankOracle<'a> {
    fn new(h: &'a FMatrix) -> Self {
        match h.tower().packed_ctx(h.level()) {
            Some(ctx) => {
                let tower = h.tower();
                let packed = PackedMatrix::from_indices(
                    h.rows(),
                    h.cols(),
                    |i, j| tower.index(h.get(i, j)) as usize,
                    &ctx,
                );
                RankOracle::Packed { ctx, packed }
            }
            None => RankOracle::Generic(h),
        }
    }

    fn rank_of_cols(&self, cols: &[usize], scratch: &mut Vec<u32>) -> usize {
        match self {
            RankOracle::Packed { ctx, packed } => packed.rank_of_cols(ctx, cols, scratch),
            RankOracle::Generic(h) => h.rank_of_cols(cols),
        }
    }
}

/// Exhaustive (or sampled) maximal-recoverability check for any profile.
pub fn verify_mrc(
    h: &FMatrix,
    p: &CodeProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CodeError> {
    check_shape(h, p)?;
    let expected = p.parity_rows();
    let oracle = RankOracle::new(h);

    match opts.mode {
        VerifyMode::Sample { count, seed } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut scratch = Vec::new();
            for i in 0..count {
                let pat = sample_pattern(p, &mut rng);
                let rank = oracle.rank_of_cols(&pat.erased(), &mut scratch);
                if rank != expected {
                    return Ok(VerificationReport {
                        passed: false,
                        patterns_checked: i + 1,
                        failure_witness: Some(FailureWitness {
                            pattern: pat,
                            rank,
                            expected,
                        }),
                        exhaustive: false,
                    });
                }
            }
            Ok(VerificationReport {
                passed: true,
                patterns_checked: count,
                failure_witness: None,
                exhaustive: false,
            })
        }
        VerifyMode::Exhaustive if opts.jobs <= 1 => {
            let mut scratch = Vec::new();
            let mut checked = 0u64;
            for pat in enumerate_erasure_patterns(p) {
                checked += 1;
                let rank = oracle.rank_of_cols(&pat.erased(), &mut scratch);
                if rank != expected {
                    return Ok(VerificationReport {
                        passed: false,
                        patterns_checked: checked,
                        failure_witness: Some(FailureWitness {
                            pattern: pat,
                            rank,
                            expected,
                        }),
                        exhaustive: true,
                    });
                }
            }
            Ok(VerificationReport {
                passed: true,
                patterns_checked: checked,
                failure_witness: None,
                exhaustive: true,
            })
        }
        VerifyMode::Exhaustive => {
            let pats: Vec<ErasurePattern> = enumerate_erasure_patterns(p).collect();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .map_err(|e| CodeError::BadParameter {
                    reason: format!("worker pool: {e}"),
                })?;
            let failure = pool.install(|| {
                pats.par_iter()
                    .enumerate()
                    .map_init(
                        Vec::new,
                        |scratch, (i, pat)| {
                            let rank = oracle.rank_of_cols(&pat.erased(), scratch);
                            (i, rank)
                        },
                    )
                    .filter(|&(_, rank)| rank != expected)
                    .min_by_key(|&(i, _)| i)
            });
            Ok(match failure {
                Some((i, rank)) => VerificationReport {
                    passed: false,
                    patterns_checked: (i + 1) as u64,
                    failure_witness: Some(FailureWitness {
                        pattern: pats[i].clone(),
                        rank,
                        expected,
                    }),
                    exhaustive: true,
                },
                None => VerificationReport {
                    passed: true,
                    patterns_checked: pats.len() as u64,
                    failure_witness: None,
                    exhaustive: true,
                },
            })
        }
    }
}

fn expect_variant(p: &CodeProfile, want: Variant) -> Result<(), CodeError> {
    if p.variant != want {
        return Err(CodeError::ShapeMismatch(format!(
            "expected a {:?} profile, got {:?}",
            want, p.variant
        )));
    }
    Ok(())
}

pub fn verify_hl_mrc(
    h: &FMatrix,
    p: &CodeProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CodeError> {
    expect_variant(p, Variant::Hl)?;
    verify_mrc(h, p, opts)
}

pub fn verify_hdl_mrc(
    h: &FMatrix,
    p: &CodeProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CodeError> {
    expect_variant(p, Variant::Hdl)?;
    verify_mrc(h, p, opts)
}

pub fn verify_data_local_mrc(
    h: &FMatrix,
    p: &CodeProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CodeError> {
    expect_variant(p, Variant::DataLocal)?;
    verify_mrc(h, p, opts)
}

pub fn verify_local_mrc(
    h: &FMatrix,
    p: &CodeProfile,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CodeError> {
    expect_variant(p, Variant::Local)?;
    verify_mrc(h, p, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMode {
    /// Input is a parity-check matrix: every (n-k)-column subset nonsingular.
    Parity,
    /// Input is a generator matrix: every k-column subset nonsingular.
    Generator,
}

/// MDS check by exhaustive minor enumeration.
pub fn verify_mds(m: &FMatrix, _mode: MdsMode) -> Result<bool, CodeError> {
    if m.rows() > m.cols() {
        return Err(CodeError::ShapeMismatch(format!(
            "{}x{} matrix cannot define an MDS puncturing",
            m.rows(),
            m.cols()
        )));
    }
    if m.rows() == 0 {
        return Ok(true);
    }
    let oracle = RankOracle::new(m);
    let mut scratch = Vec::new();
    Ok((0..m.cols())
        .combinations(m.rows())
        .all(|sel| oracle.rank_of_cols(&sel, &mut scratch) == m.rows()))
}

/// Parity-check matrix and profile of the code restricted to mid group i.
///
/// Assumes the canonical row layout the constructions emit: the rows of group
/// i are the contiguous band i*(t2*delta+h2) .. (i+1)*(t2*delta+h2). Row
/// supports are validated against A_i.
pub fn middle_parity_check(
    h: &FMatrix,
    p: &CodeProfile,
    i: usize,
) -> Result<(FMatrix, CodeProfile), CodeError> {
    if !p.is_hierarchical() {
        return Err(CodeError::BadParameter {
            reason: "middle codes exist only for hierarchical profiles".into(),
        });
    }
    check_shape(h, p)?;
    let band = p.t2 * p.delta + p.h2;
    let rows: Vec<usize> = (i * band..(i + 1) * band).collect();
    let a = p.a_group(i);
    for &r in &rows {
        for j in 0..h.cols() {
            if !a.contains(&j) && !h.tower().is_zero(h.get(r, j)) {
                return Err(CodeError::ShapeMismatch(format!(
                    "row {r} has support outside mid group {i}"
                )));
            }
        }
    }
    let cols: Vec<usize> = a.collect();
    let sub = h.select_rows(&rows).select_cols(&cols);
    let mid_profile = match p.variant {
        Variant::Hl => CodeProfile::local(p.r1, p.r2, p.h2, p.delta)?,
        Variant::Hdl => CodeProfile::data_local(p.r1, p.r2, p.h2, p.delta)?,
        _ => unreachable!(),
    };
    Ok((sub, mid_profile))
}
