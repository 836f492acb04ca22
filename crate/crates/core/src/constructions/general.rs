//! The all-parameters construction over a three-level field tower, and the
//! per-pattern algebraic certifier that avoids exhaustive rank checks.
//!
//! Block structure per mid group: delta Vandermonde rows on each local group
//! (first row all ones, nodes 0, β, β², …), h2 Moore rows of q-powers of the
//! shared alpha layout, and h1 global Moore rows of q^M1-powers of the lambda
//! layout. Alphas are (delta+1)h2-wise independent over F_q, lambdas are
//! (delta+1)(h2+1)h1-wise independent over F_(q^M1).

use std::sync::Arc;

use super::{
    assemble, CertMethod, ConstructError, ConstructedCode, ConstructionCertificate, Family,
    ParityCheck,
};
use crate::arith;
use crate::code::{enumerate_mid_patterns, CodeProfile, ErasurePattern};
use crate::field::{Element, FieldTower};
use crate::kwise::{generate, KWiseError, KWiseMethod, KWiseRequest};
use crate::matrix::{moore, vandermonde, FMatrix, IndexedElementSet};

/// Theorem-style extension degree target:
/// 1 + ceil((Q-1)/Q * (k-1)) * ceil(log_Q count).
fn degree_target(q: u128, k: usize, count: usize) -> usize {
    if k <= 1 {
        return 1;
    }
    let num = (q - 1) * (k as u128 - 1);
    let frac = num.div_ceil(q) as usize;
    1 + frac * arith::ceil_log(q, count as u128) as usize
}

/// k-wise independent set with the BCH-first policy; when the target degree
/// is overshot by the BCH sizing and the greedy search also misses it, the
/// BCH set is taken anyway and the departure recorded.
fn pick_set(
    tower: &Arc<FieldTower>,
    base_level: usize,
    count: usize,
    k: usize,
    target: usize,
    label: &str,
    notes: &mut Vec<String>,
) -> Result<crate::kwise::KWiseSet, ConstructError> {
    let req = KWiseRequest {
        base_level,
        count,
        k,
        max_extension_degree: target,
    };
    match generate(tower, &req) {
        Ok(set) => {
            if set.method == KWiseMethod::GreedySearch {
                notes.push(format!("{label}: greedy search fallback (degree {})", set.degree));
            }
            Ok(set)
        }
        Err(KWiseError::ExtensionCapExceeded { .. }) => {
            let set = crate::kwise::bch_columns(tower, base_level, count, k)?;
            notes.push(format!(
                "{label}: BCH columns above the degree target {target} (degree {})",
                set.degree
            ));
            Ok(set)
        }
        Err(e) => Err(e.into()),
    }
}

/// Build a hierarchical-local MRC for any profile, certified by the
/// all-pattern algebraic conditions.
pub fn construct_general(profile: &CodeProfile) -> Result<ConstructedCode, ConstructError> {
    super::expect_hl(profile, "construct_general")?;
    let p = profile;
    let mut notes = Vec::new();

    // smallest prime power strictly greater than n2
    let q = arith::next_prime_power(p.n2 as u64);
    let (char_p, e) = arith::prime_power(q).expect("next_prime_power");
    let base = Arc::new(if e > 1 {
        FieldTower::with_canonical_moduli(char_p, &[e as usize])?
    } else {
        FieldTower::prime(char_p)?
    });
    let local_level = base.top_level();

    // shared alpha layout across mid groups: n2*t2 elements,
    // (delta+1)h2-wise independent over F_q
    let (tower_mid, mid_level, alphas): (Arc<FieldTower>, usize, Vec<Element>) = if p.h2 > 0 {
        let k_alpha = (p.delta + 1) * p.h2;
        let target = degree_target(q as u128, k_alpha, p.n2 * p.t2);
        let set = pick_set(
            &base,
            local_level,
            p.n2 * p.t2,
            k_alpha,
            target,
            "alpha layout",
            &mut notes,
        )?;
        let level = set.elems()[0].level();
        (set.tower.clone(), level, set.elems().to_vec())
    } else {
        (base.clone(), local_level, Vec::new())
    };

    // global lambda layout: n elements, (delta+1)(h2+1)h1-wise independent
    // over F_(q^M1)
    let q1 = tower_mid.size(mid_level);
    let (tower_top, global_level, lambdas): (Arc<FieldTower>, usize, Vec<Element>) = if p.h1 > 0 {
        let k_lambda = (p.delta + 1) * (p.h2 + 1) * p.h1;
        let target = degree_target(q1, k_lambda, p.n);
        let set = pick_set(
            &tower_mid,
            mid_level,
            p.n,
            k_lambda,
            target,
            "lambda layout",
            &mut notes,
        )?;
        let level = set.elems()[0].level();
        (set.tower.clone(), level, set.elems().to_vec())
    } else {
        (tower_mid.clone(), mid_level, Vec::new())
    };

    let beta = tower_top.primitive_element(local_level)?;
    let mut nodes = vec![tower_top.zero(local_level)];
    for j in 1..p.n2 {
        nodes.push(tower_top.pow(&beta, j as u128));
    }
    let m0 = vandermonde(&tower_top, local_level, &nodes, p.delta, 0)?;

    let mid_block = |s: usize| {
        moore(
            &tower_top,
            mid_level,
            &alphas[s * p.n2..(s + 1) * p.n2],
            p.h2,
            q as u128,
        )
        .expect("mid Moore block")
    };
    let global_block = |i: usize, s: usize| {
        let start = i * p.n1 + s * p.n2;
        moore(
            &tower_top,
            global_level,
            &lambdas[start..start + p.n2],
            p.h1,
            q1,
        )
        .expect("global Moore block")
    };

    let pc = assemble(
        p,
        Family::General,
        &m0,
        &mid_block,
        &global_block,
        local_level,
        mid_level,
        global_level,
    )?;

    // certify by the per-pattern algebraic conditions
    let mut checks = 0u64;
    for pat in enumerate_mid_patterns(p) {
        checks += 1;
        if !check_theorem2(&pc, &pat)? {
            return Err(ConstructError::CertificationFailed(format!(
                "algebraic conditions failed on pattern {pat:?}"
            )));
        }
    }
    Ok(ConstructedCode {
        code: pc,
        certificate: ConstructionCertificate {
            method: CertMethod::Theorem2Conditions,
            checks,
            notes,
        },
    })
}

/// Extract the shared alpha layout (mid band, first row) of a general-family
/// code, projected to the mid level.
fn extract_alphas(pc: &ParityCheck) -> Result<Vec<Element>, ConstructError> {
    let p = &pc.profile;
    let t = pc.matrix.tower();
    let mut alphas = Vec::with_capacity(p.n2 * p.t2);
    if p.h2 == 0 {
        return Ok(alphas);
    }
    let (_, band) = &pc.bands.mid[0];
    for j in band.cols.clone() {
        alphas.push(t.project(pc.matrix.get(band.rows.start, j), pc.bands.mid_level)?);
    }
    Ok(alphas)
}

fn extract_lambdas(pc: &ParityCheck) -> Result<Vec<Element>, ConstructError> {
    let p = &pc.profile;
    let t = pc.matrix.tower();
    let mut lambdas = Vec::with_capacity(p.n);
    let Some(band) = &pc.bands.global else {
        return Ok(lambdas);
    };
    for j in 0..p.n {
        lambdas.push(t.project(pc.matrix.get(band.rows.start, j), pc.bands.global_level)?);
    }
    Ok(lambdas)
}

fn extract_m0(pc: &ParityCheck) -> Result<FMatrix, ConstructError> {
    let t = pc.matrix.tower().clone();
    let (_, band) = &pc.bands.local[0];
    let level = pc.bands.local_level;
    let r0 = band.rows.start;
    let c0 = band.cols.start;
    Ok(FMatrix::from_fn(
        t.clone(),
        level,
        band.rows.len(),
        band.cols.len(),
        |i, j| {
            t.project(pc.matrix.get(r0 + i, c0 + j), level)
                .expect("local band entries validated resident")
        },
    )?)
}

/// The per-pattern algebraic conditions for the general family: after
/// eliminating the erased local coordinates, the surviving mid combinations
/// must be h2-wise independent over F_q per group, and after eliminating the
/// mid erasures the surviving global combinations must be h1-wise independent
/// over F_(q^M1). Returns true iff both hold for this (delta, h2) pattern.
pub fn check_theorem2(pc: &ParityCheck, pattern: &ErasurePattern) -> Result<bool, ConstructError> {
    if pc.family != Family::General {
        return Err(ConstructError::WrongFamily(format!(
            "algebraic certification applies to the general family, not {:?}",
            pc.family
        )));
    }
    let p = &pc.profile;
    let tower = pc.matrix.tower().clone();
    let local_level = pc.bands.local_level;
    let mid_level = pc.bands.mid_level;
    let global_level = pc.bands.global_level;
    let q = tower.size(local_level);

    let m0 = extract_m0(pc)?;
    let alphas = extract_alphas(pc)?;
    let lambdas = extract_lambdas(pc)?;

    let mut theta: Vec<Element> = Vec::with_capacity(p.t1 * p.r1);
    for i in 0..p.t1 {
        // per local group: L_{i,s} and the combined survivor rows
        let mut psi: Vec<(usize, Element)> = Vec::new(); // (coordinate, value)
        let mut phi: Vec<(usize, Element)> = Vec::new();
        for s in 0..p.t2 {
            let b = p.b_group(i, s);
            let erased: Vec<usize> = pattern.delta_sets[i * p.t2 + s]
                .iter()
                .map(|&c| c - b.start)
                .collect();
            let kept: Vec<usize> = (0..p.n2).filter(|j| !erased.contains(j)).collect();
            let l_block = if p.delta > 0 {
                let me = m0.select_cols(&erased);
                let inv = me
                    .inverse()
                    .map_err(|_| ConstructError::SingularLocalBlock)?;
                inv.matmul(&m0.select_cols(&kept))?
            } else {
                FMatrix::zeros(tower.clone(), local_level, 0, kept.len())
            };
            let combine = |vals: &[Element], level: usize| -> Result<Vec<Element>, ConstructError> {
                let row_kept = FMatrix::from_fn(tower.clone(), level, 1, kept.len(), |_, j| {
                    vals[kept[j]].clone()
                })?;
                let row_erased = FMatrix::from_fn(tower.clone(), level, 1, erased.len(), |_, j| {
                    vals[erased[j]].clone()
                })?;
                // true row-reduction value: kept - erased * L
                let folded = row_kept.sub(&row_erased.matmul(&l_block)?)?;
                Ok((0..kept.len()).map(|j| folded.get(0, j).clone()).collect())
            };
            if p.h2 > 0 {
                let vals = combine(&alphas[s * p.n2..(s + 1) * p.n2], mid_level)?;
                for (jj, &j) in kept.iter().enumerate() {
                    psi.push((b.start + j, vals[jj].clone()));
                }
            }
            if p.h1 > 0 {
                let vals = combine(&lambdas[i * p.n1 + s * p.n2..i * p.n1 + (s + 1) * p.n2], global_level)?;
                for (jj, &j) in kept.iter().enumerate() {
                    phi.push((b.start + j, vals[jj].clone()));
                }
            }
        }
        psi.sort_by_key(|(c, _)| *c);
        phi.sort_by_key(|(c, _)| *c);

        if p.h2 > 0 {
            let set = IndexedElementSet::new(
                tower.clone(),
                local_level,
                psi.iter().map(|(_, v)| v.clone()).collect(),
            )?;
            if !set.is_k_wise_independent(p.h2).independent {
                return Ok(false);
            }
        }

        if p.h1 == 0 {
            continue;
        }

        // split survivors into the gamma erasures and the rest
        let gamma: Vec<usize> = pattern.gamma_sets[i].clone();
        let (g_idx, rest_idx): (Vec<usize>, Vec<usize>) = {
            let mut g = Vec::new();
            let mut r = Vec::new();
            for (pos, (c, _)) in phi.iter().enumerate() {
                if gamma.contains(c) {
                    g.push(pos);
                } else {
                    r.push(pos);
                }
            }
            (g, r)
        };
        debug_assert_eq!(g_idx.len(), p.h2);

        let z_block = if p.h2 > 0 {
            let psi_vals: Vec<Element> = psi.iter().map(|(_, v)| v.clone()).collect();
            let f = moore(&tower, mid_level, &psi_vals, p.h2, q)?;
            let fg = f.select_cols(&g_idx);
            let fr = f.select_cols(&rest_idx);
            let inv = fg.inverse().map_err(|_| ConstructError::SingularGammaBlock)?;
            inv.matmul(&fr)?
        } else {
            FMatrix::zeros(tower.clone(), mid_level, 0, rest_idx.len())
        };
        let phi_g = FMatrix::from_fn(tower.clone(), global_level, 1, g_idx.len(), |_, j| {
            phi[g_idx[j]].1.clone()
        })?;
        let phi_r = FMatrix::from_fn(tower.clone(), global_level, 1, rest_idx.len(), |_, j| {
            phi[rest_idx[j]].1.clone()
        })?;
        let folded = phi_r.sub(&phi_g.matmul(&z_block)?)?;
        for j in 0..rest_idx.len() {
            theta.push(folded.get(0, j).clone());
        }
    }

    if p.h1 > 0 {
        let set = IndexedElementSet::new(tower.clone(), mid_level, theta)?;
        if !set.is_k_wise_independent(p.h1).independent {
            return Ok(false);
        }
    }
    Ok(true)
}
