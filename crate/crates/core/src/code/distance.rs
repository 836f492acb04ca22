//! Brute-force minimum distance from a parity-check matrix.

use itertools::Itertools;

use super::CodeError;
use crate::matrix::packed::PackedMatrix;
use crate::matrix::FMatrix;

/// Smallest w such that some w columns of H are linearly dependent. Exact and
/// exhaustive: meant for desk-scale lengths.
pub fn min_distance(h: &FMatrix) -> Result<usize, CodeError> {
    let rank = h.rank();
    if h.cols() <= rank {
        return Err(CodeError::ZeroDimensionalCode);
    }
    let packed = h.tower().packed_ctx(h.level()).map(|ctx| {
        let tower = h.tower();
        let pm = PackedMatrix::from_indices(
            h.rows(),
            h.cols(),
            |i, j| tower.index(h.get(i, j)) as usize,
            &ctx,
        );
        (ctx, pm)
    });
    let mut scratch = Vec::new();
    for w in 1..=rank + 1 {
        for sel in (0..h.cols()).combinations(w) {
            let r = match &packed {
                Some((ctx, pm)) => pm.rank_of_cols(ctx, &sel, &mut scratch),
                None => h.rank_of_cols(&sel),
            };
            if r < w {
                return Ok(w);
            }
        }
    }
    unreachable!("rank + 1 columns are always dependent")
}
