//! Deriving a hierarchical data-local MRC from a hierarchical local MRC by
//! dropping parity symbols (realized as exact row reduction) and, when the
//! divisibility cases require it, shortening data symbols (realized as
//! column deletion).

use super::{
    certify_exhaustive, Band, BandMap, ConstructError, ConstructedCode, Family, ParityCheck,
};
use crate::code::{verify_mrc, CodeProfile, Variant, VerifyOptions};
use crate::field::Element;
use crate::matrix::FMatrix;

/// Derive an HDL-MRC from a verified HL-MRC.
///
/// Cases: with r1 | h1 and r2 | h2 only parity symbols are dropped; with
/// r1 ∤ h1 the k - floor(k/r1)*r1 data symbols of the straddling mid group
/// are shortened away; with r2 ∤ h2 the r1 - floor(r1/r2)*r2 data symbols of
/// each straddling local group are shortened away. Both failing at once is
/// reported as unsupported.
pub fn derive_hdl_from_hl(pc: &ParityCheck) -> Result<ConstructedCode, ConstructError> {
    let p = &pc.profile;
    if p.variant != Variant::Hl {
        return Err(ConstructError::WrongFamily(format!(
            "derivation starts from an HL profile, got {:?}",
            p.variant
        )));
    }
    let mid_short = !p.h1.is_multiple_of(p.r1);
    let local_short = !p.h2.is_multiple_of(p.r2);
    if mid_short && local_short {
        return Err(ConstructError::UnsupportedCase(
            "both r1 ∤ h1 and r2 ∤ h2: the two shortening rules have no specified order".into(),
        ));
    }
    let report = verify_mrc(&pc.matrix, p, &VerifyOptions::default())?;
    if !report.passed {
        return Err(ConstructError::NotVerifiedInput);
    }

    let t1_data = p.k / p.r1; // full data mid groups
    let k_rem = p.k - t1_data * p.r1; // shortened data in the straddling mid group
    let t2_data = p.r1 / p.r2; // full data local groups per data group
    let r_rem = p.r1 - t2_data * p.r2; // shortened data per straddling local group
    let r1_new = t2_data * p.r2;
    let k_new = t1_data * r1_new;

    let t = pc.matrix.tower().clone();
    let top = pc.matrix.level();
    let band_rows = p.t2 * p.delta + p.h2;

    // working copy of all rows at the top level
    let mut work: Vec<Vec<Element>> = (0..pc.matrix.rows())
        .map(|r| (0..p.n).map(|j| pc.matrix.get(r, j).clone()).collect())
        .collect();

    // elimination units: (consumed rows, dropped columns)
    let mut units: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 0..t1_data {
        for s in t2_data..p.t2 {
            let rows: Vec<usize> = (i * band_rows + s * p.delta..i * band_rows + (s + 1) * p.delta)
                .collect();
            let b = p.b_group(i, s);
            let cols: Vec<usize> = (b.start + p.r2..b.end).collect();
            units.push((rows, cols));
        }
    }
    for i in t1_data..p.t1 {
        let rows: Vec<usize> = (i * band_rows..(i + 1) * band_rows).collect();
        // dropped: everything outside the canonical primary slots
        let mut cols = Vec::with_capacity(p.n1 - p.r1);
        let mut primaries_left = p.r1;
        for s in 0..p.t2 {
            let b = p.b_group(i, s);
            let take = primaries_left.min(p.r2);
            primaries_left -= take;
            cols.extend(b.start + take..b.end);
        }
        debug_assert_eq!(cols.len(), p.n1 - p.r1);
        units.push((rows, cols));
    }

    // surviving rows: kept local bands, data-group mid rows, global rows
    let mut surviving: Vec<usize> = Vec::new();
    for i in 0..t1_data {
        for s in 0..t2_data {
            surviving.extend(i * band_rows + s * p.delta..i * band_rows + (s + 1) * p.delta);
        }
        surviving.extend(i * band_rows + p.t2 * p.delta..(i + 1) * band_rows);
    }
    let global_rows: Vec<usize> = (p.t1 * band_rows..p.parity_rows()).collect();
    surviving.extend(global_rows.iter().copied());

    for (rows, cols) in &units {
        let r_mat = FMatrix::from_fn(t.clone(), top, rows.len(), p.n, |i, j| {
            work[rows[i]][j].clone()
        })?;
        let block = r_mat.select_cols(cols);
        let inv = block.inverse().map_err(|_| {
            ConstructError::CertificationFailed(
                "derivation elimination block is singular".into(),
            )
        })?;
        for &o in &surviving {
            if cols.iter().all(|&c| t.is_zero(&work[o][c])) {
                continue;
            }
            let coef = FMatrix::from_fn(t.clone(), top, 1, cols.len(), |_, j| {
                work[o][cols[j]].clone()
            })?;
            let c = coef.matmul(&inv)?;
            let folded = c.matmul(&r_mat)?;
            for (j, w) in work[o].iter_mut().enumerate() {
                *w = t.sub(w, folded.get(0, j));
            }
            debug_assert!(cols.iter().all(|&cc| t.is_zero(&work[o][cc])));
        }
    }

    // kept columns in the new layout
    let mut kept_cols: Vec<usize> = Vec::new();
    for i in 0..t1_data {
        for s in 0..p.t2 {
            let b = p.b_group(i, s);
            if s < t2_data {
                kept_cols.extend(b.clone());
            } else if r_rem > 0 && s == t2_data {
                kept_cols.extend(b.start + r_rem..b.start + p.r2);
            } else {
                kept_cols.extend(b.start..b.start + p.r2);
            }
        }
    }
    for i in t1_data..p.t1 {
        let mut primaries = Vec::with_capacity(p.r1);
        let mut left = p.r1;
        for s in 0..p.t2 {
            let b = p.b_group(i, s);
            let take = left.min(p.r2);
            left -= take;
            primaries.extend(b.start..b.start + take);
        }
        let skip = if i == t1_data { k_rem } else { 0 };
        kept_cols.extend(primaries.into_iter().skip(skip));
    }

    // new rows in the HDL layout
    let mut new_rows: Vec<usize> = Vec::new();
    for i in 0..t1_data {
        for s in 0..t2_data {
            new_rows.extend(i * band_rows + s * p.delta..i * band_rows + (s + 1) * p.delta);
        }
        new_rows.extend(i * band_rows + p.t2 * p.delta..(i + 1) * band_rows);
    }
    new_rows.extend(global_rows.iter().copied());

    let new_profile = CodeProfile::hdl(k_new, r1_new, p.r2, p.h1, p.h2, p.delta)?;
    debug_assert_eq!(kept_cols.len(), new_profile.n);
    debug_assert_eq!(new_rows.len(), new_profile.parity_rows());

    let matrix = FMatrix::from_fn(
        t.clone(),
        top,
        new_rows.len(),
        kept_cols.len(),
        |i, j| work[new_rows[i]][kept_cols[j]].clone(),
    )?;

    // rank bookkeeping: the shortened/punctured code must have dimension k_new
    if matrix.rank() != new_profile.parity_rows() {
        return Err(ConstructError::CertificationFailed(format!(
            "derived parity check has rank {}, expected {}",
            matrix.rank(),
            new_profile.parity_rows()
        )));
    }

    let np = &new_profile;
    let new_band = np.t2 * np.delta + np.h2;
    let mut bands = BandMap {
        local: Vec::new(),
        mid: Vec::new(),
        global: None,
        local_level: pc.bands.local_level,
        mid_level: pc.bands.mid_level,
        global_level: pc.bands.global_level,
    };
    for i in 0..np.t1 {
        for s in 0..np.t2 {
            bands.local.push((
                (i, s),
                Band {
                    rows: i * new_band + s * np.delta..i * new_band + (s + 1) * np.delta,
                    cols: np.b_group(i, s),
                },
            ));
        }
        if np.h2 > 0 {
            bands.mid.push((
                i,
                Band {
                    rows: i * new_band + np.t2 * np.delta..(i + 1) * new_band,
                    cols: np.a_group(i),
                },
            ));
        }
    }
    if np.h1 > 0 {
        bands.global = Some(Band {
            rows: np.t1 * new_band..np.parity_rows(),
            cols: 0..np.n,
        });
    }

    let out = ParityCheck {
        profile: new_profile,
        matrix,
        bands,
        family: Family::DerivedHdl,
    };
    out.validate()?;
    let certificate = certify_exhaustive(&out)?;
    Ok(ConstructedCode {
        code: out,
        certificate,
    })
}
