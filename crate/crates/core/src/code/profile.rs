//! Code parameter tuples and the derived group topology.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::CodeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    DataLocal,
    Local,
    Hdl,
    Hl,
}

/// Validated code parameters plus derived topology.
///
/// Flat (data-local / local) codes are stored in the hierarchical shape with
/// r1 = r2 = r, h1 = h, h2 = 0: the group structure and erasure-pattern space
/// coincide, and all verifiers operate on the hierarchical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeProfile {
    pub variant: Variant,
    pub k: usize,
    pub r1: usize,
    pub r2: usize,
    pub h1: usize,
    pub h2: usize,
    pub delta: usize,
    pub t1: usize,
    pub t2: usize,
    pub n1: usize,
    pub n2: usize,
    pub n: usize,
}

impl CodeProfile {
    /// Hierarchical local profile: r2 | (r1 + h2) and r1 | (k + h1);
    /// every coordinate lies in a local group.
    pub fn hl(
        k: usize,
        r1: usize,
        r2: usize,
        h1: usize,
        h2: usize,
        delta: usize,
    ) -> Result<Self, CodeError> {
        Self::check_positive(k, r1, r2)?;
        if !(r1 + h2).is_multiple_of(r2) {
            return Err(CodeError::DivisibilityViolation {
                condition: format!("r2 | (r1 + h2): {} does not divide {}", r2, r1 + h2),
            });
        }
        if !(k + h1).is_multiple_of(r1) {
            return Err(CodeError::DivisibilityViolation {
                condition: format!("r1 | (k + h1): {} does not divide {}", r1, k + h1),
            });
        }
        let t1 = (k + h1) / r1;
        let t2 = (r1 + h2) / r2;
        let n2 = r2 + delta;
        let n1 = r1 + h2 + t2 * delta;
        let n = k + h1 + t1 * (h2 + t2 * delta);
        debug_assert_eq!(t1 * n1, n);
        debug_assert_eq!(t2 * n2, n1);
        Ok(CodeProfile {
            variant: Variant::Hl,
            k,
            r1,
            r2,
            h1,
            h2,
            delta,
            t1,
            t2,
            n1,
            n2,
            n,
        })
    }

    /// Hierarchical data-local profile: r2 | r1 and r1 | k; the h1 global
    /// parities sit outside all mid groups.
    pub fn hdl(
        k: usize,
        r1: usize,
        r2: usize,
        h1: usize,
        h2: usize,
        delta: usize,
    ) -> Result<Self, CodeError> {
        Self::check_positive(k, r1, r2)?;
        if !r1.is_multiple_of(r2) {
            return Err(CodeError::DivisibilityViolation {
                condition: format!("r2 | r1: {} does not divide {}", r2, r1),
            });
        }
        if !k.is_multiple_of(r1) {
            return Err(CodeError::DivisibilityViolation {
                condition: format!("r1 | k: {} does not divide {}", r1, k),
            });
        }
        let t1 = k / r1;
        let t2 = r1 / r2;
        let n2 = r2 + delta;
        let n1 = r1 + h2 + t2 * delta;
        let n = k + h1 + t1 * (h2 + t2 * delta);
        debug_assert_eq!(t1 * n1 + h1, n);
        debug_assert_eq!(t2 * n2 + h2, n1);
        Ok(CodeProfile {
            variant: Variant::Hdl,
            k,
            r1,
            r2,
            h1,
            h2,
            delta,
            t1,
            t2,
            n1,
            n2,
            n,
        })
    }

    /// Data-local profile [k, r, h, delta]: r | k, local groups over data
    /// symbols only, h global parities outside.
    pub fn data_local(k: usize, r: usize, h: usize, delta: usize) -> Result<Self, CodeError> {
        let mut p = Self::hdl(k, r, r, h, 0, delta)?;
        p.variant = Variant::DataLocal;
        Ok(p)
    }

    /// Local profile [k, r, h, delta]: r | (k + h), every symbol in a group.
    pub fn local(k: usize, r: usize, h: usize, delta: usize) -> Result<Self, CodeError> {
        let mut p = Self::hl(k, r, r, h, 0, delta)?;
        p.variant = Variant::Local;
        Ok(p)
    }

    /// Dispatcher over all variants. For flat variants the r and h values are
    /// read from the r2 and h2 slots.
    pub fn make(
        variant: Variant,
        k: usize,
        r1: usize,
        r2: usize,
        h1: usize,
        h2: usize,
        delta: usize,
    ) -> Result<Self, CodeError> {
        match variant {
            Variant::Hl => Self::hl(k, r1, r2, h1, h2, delta),
            Variant::Hdl => Self::hdl(k, r1, r2, h1, h2, delta),
            Variant::DataLocal => Self::data_local(k, r2, h2, delta),
            Variant::Local => Self::local(k, r2, h2, delta),
        }
    }

    fn check_positive(k: usize, r1: usize, r2: usize) -> Result<(), CodeError> {
        if k == 0 || r1 == 0 || r2 == 0 {
            return Err(CodeError::BadParameter {
                reason: "k, r1, r2 must be positive".into(),
            });
        }
        if r2 > r1 {
            return Err(CodeError::BadParameter {
                reason: format!("r2 = {r2} exceeds r1 = {r1}"),
            });
        }
        Ok(())
    }

    /// For flat variants, the single locality radius r.
    pub fn r(&self) -> usize {
        self.r2
    }

    /// For flat variants, the global parity count h.
    pub fn h(&self) -> usize {
        self.h1
    }

    pub fn parity_rows(&self) -> usize {
        self.n - self.k
    }

    /// True when every coordinate lies inside a mid group (HL-shaped layout).
    pub fn is_hl_shaped(&self) -> bool {
        matches!(self.variant, Variant::Hl | Variant::Local)
    }

    pub fn is_hierarchical(&self) -> bool {
        matches!(self.variant, Variant::Hl | Variant::Hdl)
    }

    /// Mid group A_i as a coordinate range.
    pub fn a_group(&self, i: usize) -> Range<usize> {
        i * self.n1..(i + 1) * self.n1
    }

    /// Local group B_{i,s} as a coordinate range.
    pub fn b_group(&self, i: usize, s: usize) -> Range<usize> {
        let start = i * self.n1 + s * self.n2;
        start..start + self.n2
    }

    /// Mid-parity coordinates of A_i (empty for HL-shaped profiles).
    pub fn mid_cols(&self, i: usize) -> Range<usize> {
        if self.is_hl_shaped() {
            let end = (i + 1) * self.n1;
            end..end
        } else {
            i * self.n1 + self.t2 * self.n2..(i + 1) * self.n1
        }
    }

    /// Coordinates outside all mid groups (the global parities of HDL-shaped
    /// profiles; empty for HL-shaped ones).
    pub fn outside_cols(&self) -> Range<usize> {
        self.t1 * self.n1..self.n
    }
}
