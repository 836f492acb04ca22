//! Generation of extension-field element sets that are k-wise independent
//! over a designated base field, via narrow-sense BCH parity-check columns
//! with a greedy search fallback. Every returned set is re-verified with the
//! independence checker before it leaves this module.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::field::{Element, FieldError, FieldTower};
use crate::matrix::{FMatrix, IndexedElementSet, MatrixError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KWiseError {
    #[error("{n_cols} columns exceed the BCH length q^m - 1 = {len}")]
    LengthOverflow { n_cols: usize, len: u128 },
    #[error("no k-wise independent set found within extension degree {cap}")]
    ExtensionCapExceeded { cap: usize },
    #[error("generated set failed the independence checker")]
    VerificationFailed,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KWiseMethod {
    BchColumns,
    GreedySearch,
}

#[derive(Debug, Clone)]
pub struct KWiseRequest {
    pub base_level: usize,
    pub count: usize,
    pub k: usize,
    pub max_extension_degree: usize,
}

/// A generated set, its (possibly extended) tower, and how it was produced.
pub struct KWiseSet {
    pub tower: Arc<FieldTower>,
    pub set: IndexedElementSet,
    /// Extension degree of the elements over the base level (1 = base itself).
    pub degree: usize,
    pub method: KWiseMethod,
}

impl KWiseSet {
    pub fn elems(&self) -> &[Element] {
        self.set.elems()
    }
}

fn check_base(tower: &Arc<FieldTower>, base_level: usize) -> Result<(), KWiseError> {
    if base_level != tower.top_level() {
        return Err(KWiseError::BadRequest(format!(
            "generation extends the tower: base level {} must be the top level {}",
            base_level,
            tower.top_level()
        )));
    }
    Ok(())
}

/// Columns of the parity-check matrix of the narrow-sense BCH code over the
/// base field with designed distance k+1, packed as elements of the degree-m'
/// extension, where m' is the row count after cyclotomic-coset deduplication.
pub fn bch_columns(
    tower: &Arc<FieldTower>,
    base_level: usize,
    n_cols: usize,
    k: usize,
) -> Result<KWiseSet, KWiseError> {
    check_base(tower, base_level)?;
    if n_cols == 0 || k == 0 {
        return Err(KWiseError::BadRequest("need n_cols >= 1 and k >= 1".into()));
    }
    let q = tower.size(base_level);
    let m = arith::ceil_log(q, n_cols as u128) as usize;
    let len = q.pow(m as u32) - 1;
    if (n_cols as u128) > len {
        return Err(KWiseError::LengthOverflow { n_cols, len });
    }

    // evaluation field F_(q^m) and a primitive element of its full group
    let scratch;
    let (eval_tower, eval_level): (&FieldTower, usize) = if m == 1 {
        (tower, base_level)
    } else {
        scratch = tower.extend(m)?;
        (&scratch, base_level + 1)
    };
    let gamma = eval_tower.primitive_element(eval_level)?;

    // cyclotomic cosets of the consecutive root exponents 1..=k
    let mut leaders: Vec<u128> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for e in 1..=k as u128 {
        if seen.contains(&e) {
            continue;
        }
        let mut coset = Vec::new();
        let mut cur = e;
        loop {
            coset.push(cur);
            cur = cur * q % len;
            if cur == e {
                break;
            }
        }
        let leader = *coset.iter().min().unwrap();
        if !seen.contains(&leader) {
            leaders.push(leader);
        }
        seen.extend(coset);
    }

    // root rows gamma^(e*j) flattened to base rows, truncated to n_cols
    let mut rows: Vec<Vec<Element>> = Vec::new();
    for &e in &leaders {
        let mut cols: Vec<Vec<Element>> = Vec::with_capacity(n_cols);
        for j in 0..n_cols as u128 {
            let v = eval_tower.pow(&gamma, e * j % len);
            let flat = if eval_level == base_level {
                vec![v]
            } else {
                eval_tower.flatten(&v, base_level)?
            };
            cols.push(flat);
        }
        let height = cols[0].len();
        for r in 0..height {
            rows.push(cols.iter().map(|c| c[r].clone()).collect());
        }
    }
    let stacked = FMatrix::new(
        tower.clone(),
        base_level,
        rows.len(),
        n_cols,
        rows.into_iter().flatten().collect(),
    )?;
    // canonical reduced form; nonzero rows are an equivalent parity check
    let (red, pivots) = stacked.rref();
    let rank = pivots.len();
    debug_assert!(rank >= 1);

    let (result_tower, elems) = if rank == 1 {
        let elems: Vec<Element> = (0..n_cols).map(|j| red.get(0, j).clone()).collect();
        (tower.clone(), elems)
    } else {
        let ext = Arc::new(tower.extend(rank)?);
        let top = ext.top_level();
        let mut elems = Vec::with_capacity(n_cols);
        for j in 0..n_cols {
            let parts: Vec<Element> = (0..rank).map(|r| red.get(r, j).clone()).collect();
            elems.push(ext.unflatten(&parts, base_level, top)?);
        }
        (ext, elems)
    };

    let set = IndexedElementSet::new(result_tower.clone(), base_level, elems)?;
    if !set.is_k_wise_independent(k).independent {
        return Err(KWiseError::VerificationFailed);
    }
    Ok(KWiseSet {
        tower: result_tower,
        set,
        degree: rank,
        method: KWiseMethod::BchColumns,
    })
}

/// Greedy scan of extension elements in canonical order, adding an element
/// iff the running set stays k-wise independent; tries extension degrees
/// 1..=cap in order.
pub fn search_columns(
    tower: &Arc<FieldTower>,
    req: &KWiseRequest,
) -> Result<KWiseSet, KWiseError> {
    check_base(tower, req.base_level)?;
    if req.count < req.k || req.k == 0 {
        return Err(KWiseError::BadRequest(format!(
            "need count >= k >= 1, got count {} and k {}",
            req.count, req.k
        )));
    }
    for degree in 1..=req.max_extension_degree {
        let cand_tower = if degree == 1 {
            tower.clone()
        } else {
            Arc::new(tower.extend(degree)?)
        };
        let level = cand_tower.top_level();
        let mut elems: Vec<Element> = Vec::with_capacity(req.count);
        for idx in 1..cand_tower.size(level) {
            let x = cand_tower.from_index(level, idx)?;
            if extends_independence(&cand_tower, req.base_level, &elems, &x, req.k) {
                elems.push(x);
                if elems.len() == req.count {
                    let set =
                        IndexedElementSet::new(cand_tower.clone(), req.base_level, elems)?;
                    if !set.is_k_wise_independent(req.k).independent {
                        return Err(KWiseError::VerificationFailed);
                    }
                    return Ok(KWiseSet {
                        tower: cand_tower,
                        set,
                        degree,
                        method: KWiseMethod::GreedySearch,
                    });
                }
            }
        }
    }
    Err(KWiseError::ExtensionCapExceeded {
        cap: req.max_extension_degree,
    })
}

/// Does adding x keep the set k-wise independent? Only subsets containing x
/// need checking.
fn extends_independence(
    tower: &Arc<FieldTower>,
    base_level: usize,
    elems: &[Element],
    x: &Element,
    k: usize,
) -> bool {
    use itertools::Itertools;
    if tower.is_zero(x) {
        return false;
    }
    let max_extra = k.min(elems.len() + 1) - 1;
    for s in 0..=max_extra {
        for combo in (0..elems.len()).combinations(s) {
            let mut members: Vec<Element> = combo.iter().map(|&i| elems[i].clone()).collect();
            members.push(x.clone());
            let set = IndexedElementSet::new(tower.clone(), base_level, members)
                .expect("members share the candidate level");
            let m = set.flattened();
            if m.rank() != s + 1 {
                return false;
            }
        }
    }
    true
}

/// Preferred entry point: BCH construction first, greedy search when the BCH
/// sizing misaligns (length overflow or row count above the cap).
pub fn generate(tower: &Arc<FieldTower>, req: &KWiseRequest) -> Result<KWiseSet, KWiseError> {
    match bch_columns(tower, req.base_level, req.count, req.k) {
        Ok(set) if set.degree <= req.max_extension_degree => Ok(set),
        Ok(_) | Err(KWiseError::LengthOverflow { .. }) => search_columns(tower, req),
        Err(e) => Err(e),
    }
}
