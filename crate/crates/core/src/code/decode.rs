//! Erasure decoding: direct global solve and the hierarchical fast path.

use super::profile::CodeProfile;
use super::CodeError;
use crate::field::Element;
use crate::matrix::{FMatrix, MatrixError};

/// Solve for the erased coordinates of a received word against the full
/// parity-check matrix. `None` marks an erasure.
pub fn decode_erasures(
    h: &FMatrix,
    word: &[Option<Element>],
) -> Result<Vec<Element>, CodeError> {
    if word.len() != h.cols() {
        return Err(CodeError::ShapeMismatch(format!(
            "received word has {} symbols, code length is {}",
            word.len(),
            h.cols()
        )));
    }
    let rows: Vec<usize> = (0..h.rows()).collect();
    let cols: Vec<usize> = (0..h.cols()).collect();
    let filled = solve_scope(h, &rows, &cols, word)?;
    let mut out = Vec::with_capacity(word.len());
    for (j, w) in word.iter().enumerate() {
        match w {
            Some(e) => out.push(h.tower().embed(e, h.level())?),
            None => out.push(filled[&j].clone()),
        }
    }
    Ok(out)
}

/// Solve the subsystem given by `rows` x `cols_scope` for the erased
/// coordinates inside the scope. Returns the recovered assignments.
fn solve_scope(
    h: &FMatrix,
    rows: &[usize],
    cols_scope: &[usize],
    word: &[Option<Element>],
) -> Result<std::collections::HashMap<usize, Element>, CodeError> {
    let t = h.tower().clone();
    let level = h.level();
    let erased: Vec<usize> = cols_scope
        .iter()
        .copied()
        .filter(|&j| word[j].is_none())
        .collect();
    // rhs_r = - sum over known columns of H[r][j] * word[j]
    let mut rhs = FMatrix::zeros(t.clone(), level, rows.len(), 1);
    for (ri, &r) in rows.iter().enumerate() {
        let mut acc = t.zero(level);
        for &j in cols_scope {
            if let Some(w) = &word[j] {
                acc = t.add(&acc, &t.mul(h.get(r, j), w));
            }
        }
        rhs.set(ri, 0, t.neg(&acc));
    }
    if erased.is_empty() {
        if !rhs.is_zero() {
            return Err(CodeError::InconsistentReceived);
        }
        return Ok(std::collections::HashMap::new());
    }
    let sub = h.select_rows(rows).select_cols(&erased);
    let rank = sub.rank();
    if rank < erased.len() {
        return Err(CodeError::UnrecoverablePattern {
            deficit: erased.len() - rank,
        });
    }
    let x = match sub.solve(&rhs) {
        Ok(x) => x,
        Err(MatrixError::Inconsistent) => return Err(CodeError::InconsistentReceived),
        Err(e) => return Err(e.into()),
    };
    Ok(erased
        .iter()
        .enumerate()
        .map(|(i, &j)| (j, x.get(i, 0).clone()))
        .collect())
}

/// Hierarchical decoding: local groups first (using only their delta rows),
/// then whole mid groups, then the global system. Produces the same codeword
/// as [`decode_erasures`] whenever the pattern is recoverable.
///
/// Assumes the canonical row layout of the constructions (validated; falls
/// back to the direct global solve when the layout does not match).
pub fn decode_hierarchical(
    h: &FMatrix,
    p: &CodeProfile,
    word: &[Option<Element>],
) -> Result<Vec<Element>, CodeError> {
    if word.len() != h.cols() || h.cols() != p.n || h.rows() != p.parity_rows() {
        return Err(CodeError::ShapeMismatch(format!(
            "word: {}, matrix: {}x{}, profile: n={} parity={}",
            word.len(),
            h.rows(),
            h.cols(),
            p.n,
            p.parity_rows()
        )));
    }
    if !canonical_layout(h, p) {
        return decode_erasures(h, word);
    }
    let band = p.t2 * p.delta + p.h2;
    let mut work: Vec<Option<Element>> = word.to_vec();

    // stage 1: local groups with at most delta erasures
    for i in 0..p.t1 {
        for s in 0..p.t2 {
            let rows: Vec<usize> = (i * band + s * p.delta..i * band + (s + 1) * p.delta).collect();
            let scope: Vec<usize> = p.b_group(i, s).collect();
            let erased = scope.iter().filter(|&&j| work[j].is_none()).count();
            if erased == 0 || erased > p.delta {
                continue;
            }
            match solve_scope(h, &rows, &scope, &work) {
                Ok(fills) => {
                    for (j, v) in fills {
                        work[j] = Some(v);
                    }
                }
                Err(CodeError::UnrecoverablePattern { .. }) => {} // defer to later stages
                Err(e) => return Err(e),
            }
        }
    }

    // stage 2: whole mid groups using their local + mid rows
    for i in 0..p.t1 {
        let rows: Vec<usize> = (i * band..(i + 1) * band).collect();
        let scope: Vec<usize> = p.a_group(i).collect();
        let erased = scope.iter().filter(|&&j| work[j].is_none()).count();
        if erased == 0 || erased > band {
            continue;
        }
        match solve_scope(h, &rows, &scope, &work) {
            Ok(fills) => {
                for (j, v) in fills {
                    work[j] = Some(v);
                }
            }
            Err(CodeError::UnrecoverablePattern { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    // stage 3: global solve for whatever remains (also validates consistency)
    decode_erasures(h, &work)
}

/// Check that each group's row band is supported inside its mid group and
/// each local row band inside its local group.
fn canonical_layout(h: &FMatrix, p: &CodeProfile) -> bool {
    let t = h.tower();
    let band = p.t2 * p.delta + p.h2;
    for i in 0..p.t1 {
        let a = p.a_group(i);
        for r in i * band..(i + 1) * band {
            for j in 0..h.cols() {
                if !a.contains(&j) && !t.is_zero(h.get(r, j)) {
                    return false;
                }
            }
        }
        for s in 0..p.t2 {
            let b = p.b_group(i, s);
            for r in i * band + s * p.delta..i * band + (s + 1) * p.delta {
                for j in 0..h.cols() {
                    if !b.contains(&j) && !t.is_zero(h.get(r, j)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}
