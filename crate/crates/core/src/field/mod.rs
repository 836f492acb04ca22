//! Prime fields and extension towers with canonical element representation.
//!
//! A tower is a chain F_p ⊆ F_{p^d1} ⊆ F_{p^(d1·d2)} ⊆ … where each level is a
//! polynomial extension of the previous one. Elements are dense coordinate
//! vectors over the prime field in the canonical tower basis (little-endian by
//! degree, inner extension first). Levels with at most 2^16 elements get
//! log/antilog tables; larger levels fall back to polynomial arithmetic.

mod poly;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;

/// Largest level size that gets log/antilog multiplication tables.
const TABLE_MAX: u128 = 1 << 16;

/// Guard for operations that enumerate a whole level.
const ENUM_MAX: u128 = 1 << 21;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus polynomial at step {step} is reducible")]
    ReduciblePolynomial { step: usize },
    #[error("extension degree must be at least 2 (step {step} has degree {degree})")]
    InvalidDegree { step: usize, degree: usize },
    #[error("mid extension degree {m1} does not divide top degree {m}")]
    DegreeDivisibilityViolation { m1: usize, m: usize },
    #[error("malformed modulus at step {step}: {reason}")]
    BadModulus { step: usize, reason: String },
    #[error("no tower level {level}")]
    NoSuchLevel { level: usize },
    #[error("coordinate vector has length {got}, expected {expected}")]
    BadCoords { got: usize, expected: usize },
    #[error("element index {idx} out of range for level {level}")]
    IndexOutOfRange { idx: u128, level: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("target level {target} is not below element level {level}")]
    LevelOrderViolation { level: usize, target: usize },
    #[error("element is not in the level-{level} subfield")]
    NotInSubfield { level: usize },
    #[error("field too small for a primitive element")]
    FieldTooSmall,
    #[error("no subgroup of order >= {min_size} with >= {min_cosets} cosets in a group of order {group_order}")]
    NoSuitableSubgroup {
        min_size: u64,
        min_cosets: u64,
        group_order: u128,
    },
    #[error("tower size exceeds the supported range")]
    SizeOverflow,
    #[error("level of size {size} is too large for this operation")]
    TooLarge { size: u128 },
}

/// Serializable description of a field tower.
///
/// `moduli[j]` lists the coefficients of the step-`j` modulus polynomial in
/// ascending degree. Each coefficient is the canonical index of an element of
/// level `j` (base-p little-endian packing of its coordinate vector), so for
/// the first step the coefficients are plain residues mod p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub degrees: Vec<usize>,
    pub moduli: Vec<Vec<u64>>,
}

/// An element of some tower level, as canonical prime-field coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    level: usize,
    coords: Vec<u64>,
}

impl Element {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

struct Tables {
    /// log[idx] = discrete log base the canonical primitive element; log[0] unused.
    log: Vec<u32>,
    /// exp has length 2(Q-1) so sums of two logs need no reduction.
    exp: Vec<u32>,
    /// Zech logarithms: zech[i] = log(γ^i + 1), u32::MAX when γ^i + 1 = 0.
    zech: Vec<u32>,
}

struct Level {
    coord_len: usize,
    step_degree: usize,
    size: u128,
    /// Reduction row: x^d = red[0] + red[1] x + … + red[d-1] x^(d-1), entries
    /// as prime coordinates of sublevel elements. Empty for the prime level.
    red: Vec<Vec<u64>>,
    tables: Option<Tables>,
    primitive: OnceLock<Vec<u64>>,
}

/// Arithmetic context for a field tower. Immutable after construction.
pub struct FieldTower {
    spec: FieldSpec,
    levels: Vec<Level>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldTower")
            .field("spec", &self.spec)
            .finish()
    }
}

impl FieldTower {
    /// Prime field F_p.
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(FieldSpec {
            p,
            degrees: Vec::new(),
            moduli: Vec::new(),
        })
    }

    /// Tower with canonical (lexicographically smallest irreducible) moduli.
    pub fn with_canonical_moduli(p: u64, degrees: &[usize]) -> Result<Self, FieldError> {
        let mut tower = Self::prime(p)?;
        for &d in degrees {
            tower = tower.extend(d)?;
        }
        Ok(tower)
    }

    /// Tower F_q ⊆ F_{q^m1} ⊆ F_{q^m} for a prime power q, with m1 | m.
    /// Degenerate degrees (m1 = 1 or m = m1) collapse levels.
    pub fn construction_tower(q: u64, m1: usize, m: usize) -> Result<Self, FieldError> {
        if m1 == 0 || m == 0 || !m.is_multiple_of(m1) {
            return Err(FieldError::DegreeDivisibilityViolation { m1, m });
        }
        let (p, e) = arith::prime_power(q).ok_or(FieldError::NonPrimeCharacteristic(q))?;
        let mut degrees = Vec::new();
        if e > 1 {
            degrees.push(e as usize);
        }
        if m1 > 1 {
            degrees.push(m1);
        }
        if m / m1 > 1 {
            degrees.push(m / m1);
        }
        Self::with_canonical_moduli(p, &degrees)
    }

    /// Validate a spec and build the arithmetic context.
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        if !arith::is_prime(spec.p as u128) {
            return Err(FieldError::NonPrimeCharacteristic(spec.p));
        }
        if spec.moduli.len() != spec.degrees.len() {
            return Err(FieldError::BadModulus {
                step: spec.moduli.len().min(spec.degrees.len()),
                reason: "one modulus polynomial per extension step required".into(),
            });
        }
        let mut tower = FieldTower {
            spec: FieldSpec {
                p: spec.p,
                degrees: Vec::new(),
                moduli: Vec::new(),
            },
            levels: vec![Level {
                coord_len: 1,
                step_degree: 1,
                size: spec.p as u128,
                red: Vec::new(),
                tables: None,
                primitive: OnceLock::new(),
            }],
        };
        tower.build_tables(0);
        for step in 0..spec.degrees.len() {
            tower = tower.extend_with(spec.degrees[step], Some(&spec.moduli[step]))?;
        }
        Ok(tower)
    }

    /// Extend the top level by `degree` using the canonical modulus.
    pub fn extend(&self, degree: usize) -> Result<Self, FieldError> {
        self.extend_with(degree, None)
    }

    fn extend_with(&self, degree: usize, modulus: Option<&[u64]>) -> Result<Self, FieldError> {
        let step = self.spec.degrees.len();
        if degree < 2 {
            return Err(FieldError::InvalidDegree { step, degree });
        }
        let top = self.top_level();
        let sub_size = self.size(top);
        let mut sz = 1u128;
        for _ in 0..degree {
            sz = sz.checked_mul(sub_size).ok_or(FieldError::SizeOverflow)?;
        }

        let coeff_indices: Vec<u64> = match modulus {
            Some(m) => {
                if m.len() != degree + 1 {
                    return Err(FieldError::BadModulus {
                        step,
                        reason: format!("expected {} coefficients, got {}", degree + 1, m.len()),
                    });
                }
                if m[degree] != 1 {
                    return Err(FieldError::BadModulus {
                        step,
                        reason: "modulus must be monic".into(),
                    });
                }
                if m.iter().any(|&c| (c as u128) >= sub_size) {
                    return Err(FieldError::BadModulus {
                        step,
                        reason: "coefficient index out of range".into(),
                    });
                }
                let coeffs: Vec<Vec<u64>> = m
                    .iter()
                    .map(|&c| self.unpack(top, c as u128))
                    .collect();
                if !poly::is_irreducible(self, top, &coeffs) {
                    return Err(FieldError::ReduciblePolynomial { step });
                }
                m.to_vec()
            }
            None => {
                let coeffs = poly::canonical_irreducible(self, top, degree)
                    .ok_or(FieldError::ReduciblePolynomial { step })?;
                coeffs
                    .iter()
                    .map(|c| self.pack(top, c) as u64)
                    .collect()
            }
        };

        let sub_len = self.coord_len(top);
        let p = self.spec.p;
        let red: Vec<Vec<u64>> = (0..degree)
            .map(|j| {
                let c = self.unpack(top, coeff_indices[j] as u128);
                c.iter().map(|&v| (p - v) % p).collect()
            })
            .collect();

        let mut spec = self.spec.clone();
        spec.degrees.push(degree);
        spec.moduli.push(coeff_indices);

        let mut levels: Vec<Level> = self
            .levels
            .iter()
            .map(|l| Level {
                coord_len: l.coord_len,
                step_degree: l.step_degree,
                size: l.size,
                red: l.red.clone(),
                tables: l.tables.as_ref().map(|t| Tables {
                    log: t.log.clone(),
                    exp: t.exp.clone(),
                    zech: t.zech.clone(),
                }),
                primitive: match l.primitive.get() {
                    Some(v) => {
                        let lock = OnceLock::new();
                        let _ = lock.set(v.clone());
                        lock
                    }
                    None => OnceLock::new(),
                },
            })
            .collect();
        levels.push(Level {
            coord_len: sub_len * degree,
            step_degree: degree,
            size: sz,
            red,
            tables: None,
            primitive: OnceLock::new(),
        });
        let mut tower = FieldTower { spec, levels };
        tower.build_tables(tower.top_level());
        Ok(tower)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn characteristic(&self) -> u64 {
        self.spec.p
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn top_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn size(&self, level: usize) -> u128 {
        self.levels[level].size
    }

    pub fn coord_len(&self, level: usize) -> usize {
        self.levels[level].coord_len
    }

    /// Level whose coordinate length equals `len`, if any.
    pub fn level_of_coord_len(&self, len: usize) -> Option<usize> {
        (0..self.levels.len()).find(|&l| self.levels[l].coord_len == len)
    }

    fn check_level(&self, level: usize) -> Result<(), FieldError> {
        if level < self.levels.len() {
            Ok(())
        } else {
            Err(FieldError::NoSuchLevel { level })
        }
    }

    // ---- element constructors ----

    pub fn zero(&self, level: usize) -> Element {
        Element {
            level,
            coords: vec![0; self.levels[level].coord_len],
        }
    }

    pub fn one(&self, level: usize) -> Element {
        let mut coords = vec![0; self.levels[level].coord_len];
        coords[0] = 1;
        Element { level, coords }
    }

    /// Element from coordinates (reduced mod p).
    pub fn element(&self, level: usize, coords: &[u64]) -> Result<Element, FieldError> {
        self.check_level(level)?;
        let expected = self.levels[level].coord_len;
        if coords.len() != expected {
            return Err(FieldError::BadCoords {
                got: coords.len(),
                expected,
            });
        }
        Ok(Element {
            level,
            coords: coords.iter().map(|&c| c % self.spec.p).collect(),
        })
    }

    /// Element of the prime level from a residue.
    pub fn scalar(&self, n: u64) -> Element {
        Element {
            level: 0,
            coords: vec![n % self.spec.p],
        }
    }

    pub fn from_index(&self, level: usize, idx: u128) -> Result<Element, FieldError> {
        self.check_level(level)?;
        if idx >= self.levels[level].size {
            return Err(FieldError::IndexOutOfRange { idx, level });
        }
        Ok(Element {
            level,
            coords: self.unpack(level, idx),
        })
    }

    /// Canonical index: base-p little-endian packing of the coordinates.
    pub fn index(&self, x: &Element) -> u128 {
        self.pack(x.level, &x.coords)
    }

    pub(crate) fn pack(&self, _level: usize, coords: &[u64]) -> u128 {
        let p = self.spec.p as u128;
        coords
            .iter()
            .rev()
            .fold(0u128, |acc, &c| acc * p + c as u128)
    }

    pub(crate) fn unpack(&self, level: usize, mut idx: u128) -> Vec<u64> {
        let p = self.spec.p as u128;
        let len = self.levels[level].coord_len;
        let mut coords = vec![0u64; len];
        for c in coords.iter_mut() {
            *c = (idx % p) as u64;
            idx /= p;
        }
        coords
    }

    pub fn is_zero(&self, x: &Element) -> bool {
        x.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self, x: &Element) -> bool {
        x.coords[0] == 1 && x.coords[1..].iter().all(|&c| c == 0)
    }

    // ---- level movement ----

    /// Embed into a level at or above the element's level.
    pub fn embed(&self, x: &Element, level: usize) -> Result<Element, FieldError> {
        self.check_level(level)?;
        if level < x.level {
            return Err(FieldError::LevelOrderViolation {
                level: x.level,
                target: level,
            });
        }
        let mut coords = x.coords.clone();
        coords.resize(self.levels[level].coord_len, 0);
        Ok(Element { level, coords })
    }

    /// True if the element lies in the image of the given (lower) level.
    pub fn in_subfield(&self, x: &Element, level: usize) -> bool {
        if level >= x.level {
            return true;
        }
        let len = self.levels[level].coord_len;
        x.coords[len..].iter().all(|&c| c == 0)
    }

    /// Project down to a lower level; errors if the element is not in it.
    pub fn project(&self, x: &Element, level: usize) -> Result<Element, FieldError> {
        self.check_level(level)?;
        if level > x.level {
            return self.embed(x, level);
        }
        if !self.in_subfield(x, level) {
            return Err(FieldError::NotInSubfield { level });
        }
        Ok(Element {
            level,
            coords: x.coords[..self.levels[level].coord_len].to_vec(),
        })
    }

    /// Coordinates of `x` over a strictly lower level, little-endian by degree.
    pub fn flatten(&self, x: &Element, over_level: usize) -> Result<Vec<Element>, FieldError> {
        self.check_level(over_level)?;
        if over_level >= x.level {
            return Err(FieldError::LevelOrderViolation {
                level: x.level,
                target: over_level,
            });
        }
        let chunk = self.levels[over_level].coord_len;
        Ok(x.coords
            .chunks(chunk)
            .map(|c| Element {
                level: over_level,
                coords: c.to_vec(),
            })
            .collect())
    }

    /// Inverse of [`flatten`]: assemble an element of `level` from its
    /// coordinate vector over a lower level.
    pub fn unflatten(
        &self,
        parts: &[Element],
        over_level: usize,
        level: usize,
    ) -> Result<Element, FieldError> {
        self.check_level(level)?;
        let chunk = self.levels[over_level].coord_len;
        let expected = self.levels[level].coord_len / chunk;
        if parts.len() != expected {
            return Err(FieldError::BadCoords {
                got: parts.len(),
                expected,
            });
        }
        let mut coords = Vec::with_capacity(self.levels[level].coord_len);
        for part in parts {
            let p = self.project(part, over_level)?;
            coords.extend_from_slice(&p.coords);
        }
        Ok(Element { level, coords })
    }

    /// Equality after embedding into the larger of the two levels.
    pub fn eq(&self, a: &Element, b: &Element) -> bool {
        let whole = a.level.max(b.level);
        let av = self.embed(a, whole).expect("embed up");
        let bv = self.embed(b, whole).expect("embed up");
        av == bv
    }

    // ---- arithmetic ----

    fn lift_pair(&self, a: &Element, b: &Element) -> (usize, Vec<u64>, Vec<u64>) {
        let level = a.level.max(b.level);
        let len = self.levels[level].coord_len;
        let mut av = a.coords.clone();
        av.resize(len, 0);
        let mut bv = b.coords.clone();
        bv.resize(len, 0);
        (level, av, bv)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        let (level, mut av, bv) = self.lift_pair(a, b);
        let p = self.spec.p;
        for (x, y) in av.iter_mut().zip(bv.iter()) {
            *x = (*x + *y) % p;
        }
        Element { level, coords: av }
    }

    pub fn neg(&self, a: &Element) -> Element {
        let p = self.spec.p;
        Element {
            level: a.level,
            coords: a.coords.iter().map(|&c| (p - c) % p).collect(),
        }
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let (level, av, bv) = self.lift_pair(a, b);
        Element {
            level,
            coords: self.mul_slices(level, &av, &bv),
        }
    }

    pub fn inv(&self, a: &Element) -> Result<Element, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Element {
            level: a.level,
            coords: self.inv_slices(a.level, &a.coords),
        })
    }

    pub fn div(&self, a: &Element, b: &Element) -> Result<Element, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// x^e with the convention pow(x, 0) = 1 for every x (including 0).
    pub fn pow(&self, x: &Element, e: u128) -> Element {
        Element {
            level: x.level,
            coords: self.pow_slices(x.level, &x.coords, e),
        }
    }

    /// Frobenius relative to a lower level: x ↦ x^|F| where F is that level.
    pub fn frobenius(&self, x: &Element, base_level: usize) -> Result<Element, FieldError> {
        self.check_level(base_level)?;
        if base_level > x.level {
            return Err(FieldError::LevelOrderViolation {
                level: x.level,
                target: base_level,
            });
        }
        Ok(self.pow(x, self.levels[base_level].size))
    }

    // ---- slice kernels ----

    pub(crate) fn add_into(&self, dst: &mut [u64], src: &[u64]) {
        let p = self.spec.p;
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            *d = (*d + *s) % p;
        }
    }

    pub(crate) fn slice_is_zero(coords: &[u64]) -> bool {
        coords.iter().all(|&c| c == 0)
    }

    pub(crate) fn mul_slices(&self, level: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        if level == 0 {
            let p = self.spec.p;
            return vec![(a[0] as u128 * b[0] as u128 % p as u128) as u64];
        }
        let lv = &self.levels[level];
        if let Some(t) = &lv.tables {
            let ai = self.pack(level, a) as usize;
            let bi = self.pack(level, b) as usize;
            if ai == 0 || bi == 0 {
                return vec![0; lv.coord_len];
            }
            let li = t.log[ai] as usize + t.log[bi] as usize;
            return self.unpack(level, t.exp[li] as u128);
        }
        let d = lv.step_degree;
        let cl = self.levels[level - 1].coord_len;
        let mut acc = vec![0u64; (2 * d - 1) * cl];
        for i in 0..d {
            let ai = &a[i * cl..(i + 1) * cl];
            if Self::slice_is_zero(ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * cl..(j + 1) * cl];
                if Self::slice_is_zero(bj) {
                    continue;
                }
                let prod = self.mul_slices(level - 1, ai, bj);
                self.add_into(&mut acc[(i + j) * cl..(i + j + 1) * cl], &prod);
            }
        }
        for t in (d..2 * d - 1).rev() {
            let c = acc[t * cl..(t + 1) * cl].to_vec();
            if Self::slice_is_zero(&c) {
                continue;
            }
            for j in 0..d {
                let r = &lv.red[j];
                if Self::slice_is_zero(r) {
                    continue;
                }
                let prod = self.mul_slices(level - 1, &c, r);
                self.add_into(&mut acc[(t - d + j) * cl..(t - d + j + 1) * cl], &prod);
            }
        }
        acc.truncate(d * cl);
        acc
    }

    pub(crate) fn pow_slices(&self, level: usize, x: &[u64], mut e: u128) -> Vec<u64> {
        let mut result = {
            let mut one = vec![0u64; self.levels[level].coord_len];
            one[0] = 1;
            one
        };
        if e == 0 {
            return result;
        }
        if let Some(t) = &self.levels[level].tables {
            let xi = self.pack(level, x) as usize;
            if xi == 0 {
                return vec![0; self.levels[level].coord_len];
            }
            let order = self.levels[level].size as u64 - 1;
            let l = (t.log[xi] as u128 * (e % order as u128) % order as u128) as usize;
            return self.unpack(level, t.exp[l] as u128);
        }
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_slices(level, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_slices(level, &base, &base);
            }
        }
        result
    }

    pub(crate) fn inv_slices(&self, level: usize, x: &[u64]) -> Vec<u64> {
        if let Some(t) = &self.levels[level].tables {
            let xi = self.pack(level, x) as usize;
            let order = (self.levels[level].size - 1) as usize;
            let l = (order - t.log[xi] as usize) % order;
            return self.unpack(level, t.exp[l] as u128);
        }
        self.pow_slices(level, x, self.levels[level].size - 2)
    }

    // ---- tables ----

    fn build_tables(&mut self, level: usize) {
        let size = self.levels[level].size;
        if !(3..=TABLE_MAX).contains(&size) {
            return;
        }
        let prim = match self.find_primitive(level) {
            Ok(v) => v,
            Err(_) => return,
        };
        let q = size as usize;
        let mut exp = vec![0u32; 2 * (q - 1)];
        let mut log = vec![u32::MAX; q];
        let mut cur = {
            let mut one = vec![0u64; self.levels[level].coord_len];
            one[0] = 1;
            one
        };
        for i in 0..q - 1 {
            let idx = self.pack(level, &cur) as u32;
            exp[i] = idx;
            exp[i + (q - 1)] = idx;
            log[idx as usize] = i as u32;
            cur = self.mul_slices(level, &cur, &prim);
        }
        debug_assert!(cur[0] == 1 && cur[1..].iter().all(|&c| c == 0));
        let p = self.spec.p;
        let mut zech = vec![u32::MAX; q - 1];
        for (i, z) in zech.iter_mut().enumerate() {
            let mut coords = self.unpack(level, exp[i] as u128);
            coords[0] = (coords[0] + 1) % p;
            let idx = self.pack(level, &coords) as usize;
            if idx != 0 {
                *z = log[idx];
            }
        }
        self.levels[level].tables = Some(Tables { log, exp, zech });
    }

    #[cfg(test)]
    pub(crate) fn has_tables(&self, level: usize) -> bool {
        self.levels[level].tables.is_some()
    }

    /// Packed log-domain arithmetic for a table-backed level.
    pub(crate) fn packed_ctx(&self, level: usize) -> Option<PackedCtx<'_>> {
        self.levels[level].tables.as_ref().map(|t| PackedCtx {
            log: &t.log,
            exp: &t.exp,
            zech: &t.zech,
            order: (self.levels[level].size - 1) as u32,
            char2: self.spec.p == 2,
        })
    }

    fn find_primitive(&self, level: usize) -> Result<Vec<u64>, FieldError> {
        if let Some(v) = self.levels[level].primitive.get() {
            return Ok(v.clone());
        }
        let size = self.levels[level].size;
        if size < 3 {
            return Err(FieldError::FieldTooSmall);
        }
        let order = size - 1;
        let factors: Vec<u128> = arith::factor(order).into_iter().map(|(p, _)| p).collect();
        for idx in 1..size {
            let x = self.unpack(level, idx);
            let primitive = factors
                .iter()
                .all(|&f| !is_one_slice(&self.pow_slices(level, &x, order / f)));
            if primitive {
                let _ = self.levels[level].primitive.set(x.clone());
                return Ok(x);
            }
        }
        Err(FieldError::FieldTooSmall)
    }

    /// Canonical primitive element: first element in canonical order whose
    /// multiplicative order is |level| - 1.
    pub fn primitive_element(&self, level: usize) -> Result<Element, FieldError> {
        self.check_level(level)?;
        if self.levels[level].size < 3 {
            return Err(FieldError::FieldTooSmall);
        }
        Ok(Element {
            level,
            coords: self.find_primitive(level)?,
        })
    }

    pub fn multiplicative_order(&self, x: &Element) -> Result<u128, FieldError> {
        if self.is_zero(x) {
            return Err(FieldError::DivisionByZero);
        }
        let group = self.levels[x.level].size - 1;
        let mut order = group;
        for (p, e) in arith::factor(group) {
            for _ in 0..e {
                if is_one_slice(&self.pow_slices(x.level, &x.coords, order / p)) {
                    order /= p;
                } else {
                    break;
                }
            }
        }
        Ok(order)
    }

    /// Smallest-order multiplicative subgroup with order >= `min_size` and at
    /// least `min_cosets` cosets, with canonical coset representatives.
    pub fn find_subgroup(
        &self,
        level: usize,
        min_size: u64,
        min_cosets: u64,
    ) -> Result<SubgroupHandle, FieldError> {
        self.check_level(level)?;
        let size = self.levels[level].size;
        if size > ENUM_MAX {
            return Err(FieldError::TooLarge { size });
        }
        let group = (size - 1) as u64;
        let order = arith::divisors(group as u128)
            .into_iter()
            .map(|d| d as u64)
            .find(|&d| d >= min_size.max(1) && group / d >= min_cosets.max(1))
            .ok_or(FieldError::NoSuitableSubgroup {
                min_size,
                min_cosets,
                group_order: group as u128,
            })?;
        let g = self.primitive_element(level)?;
        let generator = self.pow(&g, (group / order) as u128);
        let members: Vec<u128> = {
            let mut m = Vec::with_capacity(order as usize);
            let mut cur = self.one(level);
            for _ in 0..order {
                m.push(self.index(&cur));
                cur = self.mul(&cur, &generator);
            }
            m
        };
        let mut covered = std::collections::HashSet::with_capacity(size as usize);
        let mut coset_reps = Vec::with_capacity((group / order) as usize);
        for idx in 1..size {
            if covered.contains(&idx) {
                continue;
            }
            let rep = self.from_index(level, idx)?;
            for m in &members {
                let me = self.from_index(level, *m)?;
                covered.insert(self.index(&self.mul(&rep, &me)));
            }
            coset_reps.push(rep);
        }
        Ok(SubgroupHandle {
            level,
            generator,
            order,
            coset_reps,
        })
    }
}

/// Log-domain view of a table level: values are discrete logs in 0..order,
/// with [`PACKED_ZERO`] as the zero sentinel.
pub(crate) struct PackedCtx<'a> {
    pub log: &'a [u32],
    #[cfg_attr(not(test), allow(dead_code))]
    pub exp: &'a [u32],
    pub zech: &'a [u32],
    pub order: u32,
    pub char2: bool,
}

/// Sentinel for the zero element in packed (log-domain) form.
pub(crate) const PACKED_ZERO: u32 = u32::MAX;

impl PackedCtx<'_> {
    #[allow(clippy::wrong_self_convention)]
    #[inline]
    pub fn from_index(&self, idx: usize) -> u32 {
        if idx == 0 {
            PACKED_ZERO
        } else {
            self.log[idx]
        }
    }

    #[cfg_attr(not(test), allow(dead_code))]
    #[inline]
    pub fn to_index(&self, v: u32) -> usize {
        if v == PACKED_ZERO {
            0
        } else {
            self.exp[v as usize] as usize
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == PACKED_ZERO || b == PACKED_ZERO {
            return PACKED_ZERO;
        }
        let s = a + b;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.char2 || a == PACKED_ZERO {
            return a;
        }
        let s = a + self.order / 2;
        if s >= self.order {
            s - self.order
        } else {
            s
        }
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == PACKED_ZERO {
            return b;
        }
        if b == PACKED_ZERO {
            return a;
        }
        // a + b = γ^a (1 + γ^(b-a))
        let d = if b >= a { b - a } else { b + self.order - a };
        let z = self.zech[d as usize];
        if z == PACKED_ZERO {
            return PACKED_ZERO;
        }
        self.mul(a, z)
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

fn is_one_slice(coords: &[u64]) -> bool {
    coords[0] == 1 && coords[1..].iter().all(|&c| c == 0)
}

/// A multiplicative subgroup with materialized coset representatives.
#[derive(Debug, Clone)]
pub struct SubgroupHandle {
    pub level: usize,
    pub generator: Element,
    pub order: u64,
    pub coset_reps: Vec<Element>,
}

impl SubgroupHandle {
    /// Members in generation order (1, g, g^2, …).
    pub fn members(&self, tower: &FieldTower) -> Vec<Element> {
        let mut out = Vec::with_capacity(self.order as usize);
        let mut cur = tower.one(self.level);
        for _ in 0..self.order {
            out.push(cur.clone());
            cur = tower.mul(&cur, &self.generator);
        }
        out
    }

    /// Membership test: x != 0 and x^order = 1.
    pub fn contains(&self, tower: &FieldTower, x: &Element) -> bool {
        if tower.is_zero(x) {
            return false;
        }
        tower.is_one(&tower.pow(x, self.order as u128))
    }
}

#[cfg(test)]
mod tests;
