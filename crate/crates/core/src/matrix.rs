//! Dense matrices over a tower level: rank, determinant, solving, structured
//! builders (Vandermonde, Cauchy, Moore) and k-wise independence testing.

use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{Element, FieldError, FieldTower};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("singular system")]
    Singular,
    #[error("inconsistent system")]
    Inconsistent,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("coincident nodes: a[{a}] = b[{b}]")]
    CoincidentNodes { a: usize, b: usize },
    #[error("{0} is not the size of a tower level at or below the matrix level")]
    InvalidPowerBase(u128),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Row-major matrix with all entries normalized to one tower level.
#[derive(Clone)]
pub struct FMatrix {
    tower: Arc<FieldTower>,
    level: usize,
    rows: usize,
    cols: usize,
    data: Vec<Element>,
}

impl std::fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "FMatrix {}x{} @level {}", self.rows, self.cols, self.level)?;
        for i in 0..self.rows {
            let row: Vec<u128> = (0..self.cols)
                .map(|j| self.tower.index(self.get(i, j)))
                .collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl PartialEq for FMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level
            && self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
    }
}

impl FMatrix {
    pub fn new(
        tower: Arc<FieldTower>,
        level: usize,
        rows: usize,
        cols: usize,
        entries: Vec<Element>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        let data = entries
            .into_iter()
            .map(|e| tower.embed(&e, level))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FMatrix {
            tower,
            level,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(tower: Arc<FieldTower>, level: usize, rows: usize, cols: usize) -> Self {
        let data = vec![tower.zero(level); rows * cols];
        FMatrix {
            tower,
            level,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(tower: Arc<FieldTower>, level: usize, n: usize) -> Self {
        let mut m = Self::zeros(tower, level, n, n);
        for i in 0..n {
            let one = m.tower.one(level);
            m.set(i, i, one);
        }
        m
    }

    pub fn from_fn(
        tower: Arc<FieldTower>,
        level: usize,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Element,
    ) -> Result<Self, MatrixError> {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self::new(tower, level, rows, cols, entries)
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Element) {
        let e = self.tower.embed(&e, self.level).expect("entry level");
        self.data[i * self.cols + j] = e;
    }

    pub fn embed_to_level(&self, level: usize) -> Result<Self, MatrixError> {
        let data = self
            .data
            .iter()
            .map(|e| self.tower.embed(e, level))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FMatrix {
            tower: self.tower.clone(),
            level,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        FMatrix {
            tower: self.tower.clone(),
            level: self.level,
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn select_rows(&self, sel: &[usize]) -> Self {
        let mut data = Vec::with_capacity(sel.len() * self.cols);
        for &i in sel {
            for j in 0..self.cols {
                data.push(self.get(i, j).clone());
            }
        }
        FMatrix {
            tower: self.tower.clone(),
            level: self.level,
            rows: sel.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, sel: &[usize]) -> Self {
        let mut data = Vec::with_capacity(sel.len() * self.rows);
        for i in 0..self.rows {
            for &j in sel {
                data.push(self.get(i, j).clone());
            }
        }
        FMatrix {
            tower: self.tower.clone(),
            level: self.level,
            rows: self.rows,
            cols: sel.len(),
            data,
        }
    }

    pub fn hstack(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows {
            return Err(MatrixError::ShapeMismatch("hstack row counts differ".into()));
        }
        let level = self.level.max(other.level);
        let mut data = Vec::with_capacity((self.cols + other.cols) * self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                data.push(self.tower.embed(self.get(i, j), level)?);
            }
            for j in 0..other.cols {
                data.push(self.tower.embed(other.get(i, j), level)?);
            }
        }
        Ok(FMatrix {
            tower: self.tower.clone(),
            level,
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn vstack(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.cols {
            return Err(MatrixError::ShapeMismatch("vstack col counts differ".into()));
        }
        let level = self.level.max(other.level);
        let mut data = Vec::with_capacity(self.cols * (self.rows + other.rows));
        for e in self.data.iter().chain(other.data.iter()) {
            data.push(self.tower.embed(e, level)?);
        }
        Ok(FMatrix {
            tower: self.tower.clone(),
            level,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let level = self.level.max(other.level);
        let t = &self.tower;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = t.zero(level);
                for k in 0..self.cols {
                    acc = t.add(&acc, &t.mul(self.get(i, k), other.get(k, j)));
                }
                data.push(acc);
            }
        }
        Ok(FMatrix {
            tower: t.clone(),
            level,
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::ShapeMismatch("add shapes differ".into()));
        }
        let level = self.level.max(other.level);
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| {
                self.tower
                    .embed(&self.tower.add(a, b), level)
                    .expect("embed")
            })
            .collect();
        Ok(FMatrix {
            tower: self.tower.clone(),
            level,
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        let mut neg = other.clone();
        for e in neg.data.iter_mut() {
            *e = self.tower.neg(e);
        }
        self.add(&neg)
    }

    pub fn scale(&self, c: &Element) -> Self {
        let level = self.level.max(c.level());
        let data = self
            .data
            .iter()
            .map(|e| {
                self.tower
                    .embed(&self.tower.mul(e, c), level)
                    .expect("product level")
            })
            .collect();
        FMatrix {
            tower: self.tower.clone(),
            level,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.tower.is_zero(e))
    }

    // ---- elimination ----

    /// Row rank (uses the packed log-domain path on table-backed levels).
    pub fn rank(&self) -> usize {
        if let Some(ctx) = self.tower.packed_ctx(self.level) {
            let mut data: Vec<u32> = self
                .data
                .iter()
                .map(|e| ctx.from_index(self.tower.index(e) as usize))
                .collect();
            return packed::rank_in_place(&ctx, &mut data, self.rows, self.cols);
        }
        let mut work = self.clone();
        work.forward_eliminate().0
    }

    /// In-place forward elimination; returns (rank, pivot columns, swap parity).
    fn forward_eliminate(&mut self) -> (usize, Vec<usize>, bool) {
        let t = self.tower.clone();
        let mut rank = 0;
        let mut pivots = Vec::new();
        let mut swapped = false;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !t.is_zero(self.get(r, col))) else {
                continue;
            };
            if pivot != rank {
                for j in 0..self.cols {
                    self.data.swap(pivot * self.cols + j, rank * self.cols + j);
                }
                swapped = !swapped;
            }
            let inv = t.inv(self.get(rank, col)).expect("pivot nonzero");
            for r in rank + 1..self.rows {
                if t.is_zero(self.get(r, col)) {
                    continue;
                }
                let factor = t.mul(self.get(r, col), &inv);
                for j in col..self.cols {
                    let v = t.sub(self.get(r, j), &t.mul(&factor, self.get(rank, j)));
                    self.set(r, j, v);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        (rank, pivots, swapped)
    }

    /// Reduced row echelon form with pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let t = self.tower.clone();
        let mut work = self.clone();
        let (rank, pivots, _) = work.forward_eliminate();
        for (r, &col) in pivots.iter().enumerate() {
            let inv = t.inv(work.get(r, col)).expect("pivot nonzero");
            for j in 0..work.cols {
                let v = t.mul(work.get(r, j), &inv);
                work.set(r, j, v);
            }
            for above in 0..r {
                if t.is_zero(work.get(above, col)) {
                    continue;
                }
                let factor = work.get(above, col).clone();
                for j in 0..work.cols {
                    let v = t.sub(work.get(above, j), &t.mul(&factor, work.get(r, j)));
                    work.set(above, j, v);
                }
            }
        }
        let _ = rank;
        (work, pivots)
    }

    /// Multilinear alternating normalized determinant.
    pub fn det(&self) -> Result<Element, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let t = self.tower.clone();
        if self.rows == 0 {
            return Ok(t.one(self.level));
        }
        let mut work = self.clone();
        let (rank, _, swapped) = work.forward_eliminate();
        if rank < self.rows {
            return Ok(t.zero(self.level));
        }
        let mut det = t.one(self.level);
        for i in 0..self.rows {
            det = t.mul(&det, work.get(i, i));
        }
        if swapped {
            det = t.neg(&det);
        }
        Ok(det)
    }

    /// Solve self · x = rhs. Unique solutions only: rank must equal the
    /// column count, and the system must be consistent.
    pub fn solve(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if rhs.rows != self.rows {
            return Err(MatrixError::ShapeMismatch(format!(
                "solve: {} equations vs rhs with {} rows",
                self.rows, rhs.rows
            )));
        }
        let aug = self.hstack(rhs)?;
        let (red, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(MatrixError::Inconsistent);
        }
        if pivots.len() < self.cols {
            return Err(MatrixError::Singular);
        }
        let t = self.tower.clone();
        let mut x = FMatrix::zeros(t, red.level, self.cols, rhs.cols);
        for (r, &col) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(col, j, red.get(r, self.cols + j).clone());
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let id = FMatrix::identity(self.tower.clone(), self.level, self.rows);
        self.solve(&id)
    }

    /// Basis of the right kernel {x : self · x = 0}, one column vector per
    /// free column of the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<Element>> {
        let t = self.tower.clone();
        let (red, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![t.zero(red.level); self.cols];
            v[f] = t.one(red.level);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = t.neg(red.get(r, f));
            }
            basis.push(v);
        }
        basis
    }

    /// Rank of the submatrix formed by the given columns.
    pub fn rank_of_cols(&self, cols: &[usize]) -> usize {
        self.select_cols(cols).rank()
    }
}

// ---- structured builders ----

/// entry(i, j) = nodes[j]^(start_power + i), with 0^0 = 1.
pub fn vandermonde(
    tower: &Arc<FieldTower>,
    level: usize,
    nodes: &[Element],
    rows: usize,
    start_power: usize,
) -> Result<FMatrix, MatrixError> {
    FMatrix::from_fn(tower.clone(), level, rows, nodes.len(), |i, j| {
        tower.pow(&nodes[j], (start_power + i) as u128)
    })
}

/// entry(i, j) = 1 / (a[j] - b[i]).
pub fn cauchy(
    tower: &Arc<FieldTower>,
    level: usize,
    a: &[Element],
    b: &[Element],
) -> Result<FMatrix, MatrixError> {
    for (j, aj) in a.iter().enumerate() {
        for (i, bi) in b.iter().enumerate() {
            if tower.eq(aj, bi) {
                return Err(MatrixError::CoincidentNodes { a: j, b: i });
            }
        }
    }
    FMatrix::from_fn(tower.clone(), level, b.len(), a.len(), |i, j| {
        tower
            .inv(&tower.sub(&a[j], &b[i]))
            .expect("nodes checked distinct")
    })
}

/// entry(i, j) = elems[j]^(power_base^i); `power_base` must be a tower level
/// size at or below the matrix level.
pub fn moore(
    tower: &Arc<FieldTower>,
    level: usize,
    elems: &[Element],
    rows: usize,
    power_base: u128,
) -> Result<FMatrix, MatrixError> {
    let valid = (0..=level).any(|l| tower.size(l) == power_base);
    if !valid {
        return Err(MatrixError::InvalidPowerBase(power_base));
    }
    let mut row: Vec<Element> = elems
        .iter()
        .map(|e| tower.embed(e, level))
        .collect::<Result<_, _>>()?;
    let mut data = Vec::with_capacity(rows * elems.len());
    for i in 0..rows {
        if i > 0 {
            for e in row.iter_mut() {
                *e = tower.pow(e, power_base);
            }
        }
        data.extend(row.iter().cloned());
    }
    FMatrix::new(tower.clone(), level, rows, elems.len(), data)
}

// ---- k-wise independence ----

/// Elements of one level together with the subfield independence is measured
/// over. `base_level` may equal the elements' level, in which case flattening
/// is the identity.
#[derive(Clone)]
pub struct IndexedElementSet {
    tower: Arc<FieldTower>,
    base_level: usize,
    elems: Vec<Element>,
}

/// Outcome of an independence check; `witness` is the minimal-size,
/// lexicographically first dependent index subset when dependent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Independence {
    pub independent: bool,
    pub witness: Option<Vec<usize>>,
}

impl IndexedElementSet {
    pub fn new(
        tower: Arc<FieldTower>,
        base_level: usize,
        elems: Vec<Element>,
    ) -> Result<Self, MatrixError> {
        if elems.is_empty() {
            return Err(MatrixError::ShapeMismatch("empty element set".into()));
        }
        let level = elems.iter().map(|e| e.level()).max().unwrap();
        if base_level > level {
            return Err(MatrixError::Field(FieldError::LevelOrderViolation {
                level,
                target: base_level,
            }));
        }
        let elems = elems
            .iter()
            .map(|e| tower.embed(e, level))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IndexedElementSet {
            tower,
            base_level,
            elems,
        })
    }

    pub fn elems(&self) -> &[Element] {
        &self.elems
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    /// Matrix over the base level whose column j is elems[j] written in base
    /// level coordinates.
    pub fn flattened(&self) -> FMatrix {
        let t = &self.tower;
        let level = self.elems[0].level();
        if level == self.base_level {
            return FMatrix::new(
                t.clone(),
                self.base_level,
                1,
                self.elems.len(),
                self.elems.clone(),
            )
            .expect("shape");
        }
        let m = t.coord_len(level) / t.coord_len(self.base_level);
        FMatrix::from_fn(
            t.clone(),
            self.base_level,
            m,
            self.elems.len(),
            |i, j| {
                t.flatten(&self.elems[j], self.base_level).expect("levels")[i].clone()
            },
        )
        .expect("shape")
    }

    /// True iff every subset of size <= k is linearly independent over the
    /// base level.
    pub fn is_k_wise_independent(&self, k: usize) -> Independence {
        assert!(k >= 1, "independence order must be at least 1");
        let n = self.elems.len();
        let flat = self.flattened();
        let s = k.min(n);
        let all_full = (0..n)
            .combinations(s)
            .all(|sel| flat.rank_of_cols(&sel) == s);
        if all_full {
            return Independence {
                independent: true,
                witness: None,
            };
        }
        for size in 1..=s {
            for sel in (0..n).combinations(size) {
                if flat.rank_of_cols(&sel) < size {
                    return Independence {
                        independent: false,
                        witness: Some(sel),
                    };
                }
            }
        }
        unreachable!("a dependent subset must exist when the full scan failed");
    }
}

// ---- block determinant identities ----

/// Block-determinant identities relating a block-diagonal matrix with a
/// bottom row band to determinants of the stacked blocks. Each function
/// returns (lhs, rhs); equality is the tested fact.
pub mod identities {
    use super::*;

    fn sign(tower: &Arc<FieldTower>, level: usize, exponent: usize) -> Element {
        let one = tower.one(level);
        if exponent.is_multiple_of(2) {
            one
        } else {
            tower.neg(&one)
        }
    }

    fn stack(c: &FMatrix, rows: &[(&FMatrix, usize)]) -> FMatrix {
        let mut out = c.clone();
        for (d, j) in rows {
            out = out.vstack(&d.select_rows(&[*j])).expect("stack shape");
        }
        out
    }

    /// Block diagonal of the given blocks with a dense row band underneath.
    pub fn block_diag_with_band(blocks: &[FMatrix], band: &[FMatrix]) -> FMatrix {
        let tower = blocks[0].tower().clone();
        let level = blocks
            .iter()
            .chain(band.iter())
            .map(|m| m.level())
            .max()
            .unwrap();
        let total_cols: usize = blocks.iter().map(|m| m.cols()).sum();
        let diag_rows: usize = blocks.iter().map(|m| m.rows()).sum();
        let band_rows = band[0].rows();
        let mut out = FMatrix::zeros(tower, level, diag_rows + band_rows, total_cols);
        let mut r0 = 0;
        let mut c0 = 0;
        for b in blocks {
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    out.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows();
            c0 += b.cols();
        }
        let mut c0 = 0;
        for d in band {
            for i in 0..band_rows {
                for j in 0..d.cols() {
                    out.set(diag_rows + i, c0 + j, d.get(i, j).clone());
                }
            }
            c0 += d.cols();
        }
        out
    }

    /// h blocks C_i of shape a×(a+1) and D_i of shape h×(a+1):
    /// det[diag(C); D-band] vs (-1)^(ah(h-1)/2) · det[ det(C_i over D_i^(j)) ]_{j,i}.
    pub fn diag_id(c: &[FMatrix], d: &[FMatrix]) -> Result<(Element, Element), MatrixError> {
        let tower = c[0].tower().clone();
        let h = c.len();
        let a = c[0].rows();
        let lhs = block_diag_with_band(c, d).det()?;
        let level = lhs.level();
        let mut minors = FMatrix::zeros(tower.clone(), level, h, h);
        for (i, (ci, di)) in c.iter().zip(d.iter()).enumerate() {
            for j in 0..h {
                minors.set(j, i, stack(ci, &[(di, j)]).det()?);
            }
        }
        let rhs = tower.mul(&sign(&tower, level, a * h * (h - 1) / 2), &minors.det()?);
        Ok((lhs, rhs))
    }

    /// C1: a×(a+1), C2: a×(a+2), D1: 3×(a+1), D2: 3×(a+2).
    pub fn two_prod_id(
        c1: &FMatrix,
        c2: &FMatrix,
        d1: &FMatrix,
        d2: &FMatrix,
    ) -> Result<(Element, Element), MatrixError> {
        let tower = c1.tower().clone();
        let a = c1.rows();
        let lhs = block_diag_with_band(&[c1.clone(), c2.clone()], &[d1.clone(), d2.clone()])
            .det()?;
        let level = lhs.level();
        let term = |j1: usize, j2: usize, j3: usize| -> Result<Element, MatrixError> {
            Ok(tower.mul(
                &stack(c1, &[(d1, j1)]).det()?,
                &stack(c2, &[(d2, j2), (d2, j3)]).det()?,
            ))
        };
        let mut rhs = term(0, 1, 2)?;
        rhs = tower.sub(&rhs, &term(1, 0, 2)?);
        rhs = tower.add(&rhs, &term(2, 0, 1)?);
        rhs = tower.mul(&sign(&tower, level, a), &rhs);
        Ok((lhs, rhs))
    }

    /// C1, C2: a×(a+1), C3: a×(a+2), D1, D2: 4×(a+1), D3: 4×(a+2), with
    /// D3^(1) = D1^(2) = D2^(2) = 0.
    pub fn three_prod_id(
        c: &[FMatrix; 3],
        d: &[FMatrix; 3],
    ) -> Result<(Element, Element), MatrixError> {
        let tower = c[0].tower().clone();
        let a = c[0].rows();
        let lhs = block_diag_with_band(&c[..], &d[..]).det()?;
        let level = lhs.level();
        let term = |j1: usize, j2: usize, j3: (usize, usize)| -> Result<Element, MatrixError> {
            let t1 = stack(&c[0], &[(&d[0], j1)]).det()?;
            let t2 = stack(&c[1], &[(&d[1], j2)]).det()?;
            let t3 = stack(&c[2], &[(&d[2], j3.0), (&d[2], j3.1)]).det()?;
            Ok(tower.mul(&tower.mul(&t1, &t2), &t3))
        };
        // Signs follow the block Laplace expansion: assigning band rows
        // (j1, j2, {j3, j4}) to the three blocks contributes
        // (-1)^(3a) * (-1)^inv(j1 j2 j3 j4) per term.
        let mut rhs = tower.neg(&term(0, 2, (1, 3))?);
        rhs = tower.add(&rhs, &term(0, 3, (1, 2))?);
        rhs = tower.add(&rhs, &term(2, 0, (1, 3))?);
        rhs = tower.sub(&rhs, &term(3, 0, (1, 2))?);
        rhs = tower.mul(&sign(&tower, level, a), &rhs);
        Ok((lhs, rhs))
    }

    /// Closed form for det of the Cauchy matrix entry(i,j) = 1/(a_j - b_i):
    /// (-1)^(n(n-1)/2) · prod_{i>j} (a_i-a_j)(b_i-b_j) / prod_{i,j} (a_i-b_j).
    pub fn cauchy_det_closed_form(
        tower: &Arc<FieldTower>,
        level: usize,
        a: &[Element],
        b: &[Element],
    ) -> Result<Element, MatrixError> {
        let n = a.len();
        let mut num = tower.one(level);
        for i in 0..n {
            for j in 0..i {
                num = tower.mul(&num, &tower.sub(&a[i], &a[j]));
                num = tower.mul(&num, &tower.sub(&b[i], &b[j]));
            }
        }
        let mut den = tower.one(level);
        for ai in a {
            for bj in b {
                den = tower.mul(&den, &tower.sub(ai, bj));
            }
        }
        let v = tower.div(&num, &den)?;
        Ok(tower.mul(&sign(tower, level, n * (n - 1) / 2), &v))
    }
}

// ---- packed elimination ----

pub(crate) mod packed {
    use crate::field::{PackedCtx, PACKED_ZERO};

    /// Rank by Gaussian elimination on log-domain values; clobbers `data`.
    pub fn rank_in_place(ctx: &PackedCtx<'_>, data: &mut [u32], rows: usize, cols: usize) -> usize {
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| data[r * cols + col] != PACKED_ZERO) else {
                continue;
            };
            if pivot != rank {
                for j in col..cols {
                    data.swap(pivot * cols + j, rank * cols + j);
                }
            }
            let pinv = ctx.inv(data[rank * cols + col]);
            for r in rank + 1..rows {
                let v = data[r * cols + col];
                if v == PACKED_ZERO {
                    continue;
                }
                let factor = ctx.mul(v, pinv);
                data[r * cols + col] = PACKED_ZERO;
                for j in col + 1..cols {
                    let s = data[rank * cols + j];
                    if s == PACKED_ZERO {
                        continue;
                    }
                    data[r * cols + j] = ctx.sub(data[r * cols + j], ctx.mul(factor, s));
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }

    /// Matrix packed once for repeated column-subset rank queries.
    pub struct PackedMatrix {
        pub rows: usize,
        /// Column-major log-domain entries: col(j) at data[j*rows..(j+1)*rows].
        pub data: Vec<u32>,
    }

    impl PackedMatrix {
        pub fn from_indices(rows: usize, cols: usize, get: impl Fn(usize, usize) -> usize, ctx: &PackedCtx<'_>) -> Self {
            let mut data = Vec::with_capacity(rows * cols);
            for j in 0..cols {
                for i in 0..rows {
                    data.push(ctx.from_index(get(i, j)));
                }
            }
            PackedMatrix { rows, data }
        }

        /// Rank of the submatrix with the selected columns; `scratch` is
        /// reused across calls.
        pub fn rank_of_cols(
            &self,
            ctx: &PackedCtx<'_>,
            cols: &[usize],
            scratch: &mut Vec<u32>,
        ) -> usize {
            let k = cols.len();
            scratch.clear();
            scratch.resize(self.rows * k, PACKED_ZERO);
            for (jj, &j) in cols.iter().enumerate() {
                let col = &self.data[j * self.rows..(j + 1) * self.rows];
                for i in 0..self.rows {
                    scratch[i * k + jj] = col[i];
                }
            }
            rank_in_place(ctx, scratch, self.rows, k)
        }
    }
}
