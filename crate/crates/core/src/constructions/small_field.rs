//! The three low-field-size families: single global parity; one global and
//! one mid parity over a single field; two global parities and one mid parity
//! with Cauchy-structured blocks.

use std::sync::Arc;

use super::{
    assemble, certify_exhaustive, ConstructError, ConstructedCode, Family,
};
use crate::arith;
use crate::code::CodeProfile;
use crate::field::{Element, FieldTower};
use crate::kwise::{generate, KWiseMethod, KWiseRequest};
use crate::matrix::{cauchy, moore, vandermonde, FMatrix};

const FIELD_SEARCH_CAP: u64 = 1 << 16;

/// Single global parity (h1 = 1): the global row extends the mid Moore
/// ladder with the q^h2 power of the shared alpha layout, so everything
/// lives in F_(q^M1). Alphas are (delta+1)(h2+1)-wise independent over F_q.
pub fn construct_h1_1(profile: &CodeProfile) -> Result<ConstructedCode, ConstructError> {
    super::expect_hl(profile, "construct_h1_1")?;
    let p = profile;
    if p.h1 != 1 {
        return Err(ConstructError::WrongFamily(format!(
            "this family needs h1 = 1, profile has h1 = {}",
            p.h1
        )));
    }
    let mut notes = Vec::new();
    let q = arith::next_prime_power(p.n2 as u64);
    let (char_p, e) = arith::prime_power(q).expect("prime power");
    let base = Arc::new(if e > 1 {
        FieldTower::with_canonical_moduli(char_p, &[e as usize])?
    } else {
        FieldTower::prime(char_p)?
    });
    let local_level = base.top_level();

    let k_alpha = (p.delta + 1) * (p.h2 + 1);
    let target = {
        let num = (q as u128 - 1) * (k_alpha as u128 - 1);
        1 + num.div_ceil(q as u128) as usize
            * arith::ceil_log(q as u128, (p.n2 * p.t2) as u128) as usize
    };
    let req = KWiseRequest {
        base_level: local_level,
        count: p.n2 * p.t2,
        k: k_alpha,
        max_extension_degree: target,
    };
    let set = generate(&base, &req)?;
    if set.method == KWiseMethod::GreedySearch {
        notes.push(format!("alpha layout: greedy search (degree {})", set.degree));
    }
    let tower = set.tower.clone();
    let mid_level = set.elems()[0].level();
    let alphas = set.elems().to_vec();

    let beta = tower.primitive_element(local_level)?;
    let mut nodes = vec![tower.zero(local_level)];
    for j in 1..p.n2 {
        nodes.push(tower.pow(&beta, j as u128));
    }
    let m0 = vandermonde(&tower, local_level, &nodes, p.delta, 0)?;
    let mid_block = |s: usize| {
        moore(
            &tower,
            mid_level,
            &alphas[s * p.n2..(s + 1) * p.n2],
            p.h2,
            q as u128,
        )
        .expect("mid Moore block")
    };
    // global row: the next rung of the same Moore ladder, alpha^(q^h2)
    let qh2 = (0..p.h2).fold(1u128, |acc, _| acc * q as u128);
    let global_block = |_i: usize, s: usize| {
        FMatrix::from_fn(tower.clone(), mid_level, 1, p.n2, |_, j| {
            tower.pow(&alphas[s * p.n2 + j], qh2)
        })
        .expect("global row")
    };
    let pc = assemble(
        p,
        Family::H1Eq1,
        &m0,
        &mid_block,
        &global_block,
        local_level,
        mid_level,
        mid_level,
    )?;
    let mut certificate = certify_exhaustive(&pc)?;
    certificate.notes = notes;
    Ok(ConstructedCode {
        code: pc,
        certificate,
    })
}

/// One global and one mid parity (h1 = h2 = 1) over a single field q with a
/// multiplicative subgroup of size >= n2 and >= t2 cosets: local rows are the
/// powers alpha^1..alpha^delta, the mid row is the coset constant lambda_s,
/// the global row is alpha^(delta+1). Ascending prime-power field search.
pub fn construct_h1_1_h2_1(profile: &CodeProfile) -> Result<ConstructedCode, ConstructError> {
    super::expect_hl(profile, "construct_h1_1_h2_1")?;
    check_h1_h2(profile, 1, 1)?;
    let p = profile;
    for q in arith::prime_powers_from(3) {
        if q > FIELD_SEARCH_CAP {
            break;
        }
        match try_h11h21_over(p, q) {
            Ok(Some(built)) => return Ok(built),
            Ok(None) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(ConstructError::ParameterSelectionFailure {
        constraint: format!(
            "no prime power q <= {FIELD_SEARCH_CAP} with a subgroup of size >= {} and >= {} cosets",
            p.n2, p.t2
        ),
    })
}

/// Same family over an explicitly chosen prime power q.
pub fn construct_h1_1_h2_1_over(
    profile: &CodeProfile,
    q: u64,
) -> Result<ConstructedCode, ConstructError> {
    super::expect_hl(profile, "construct_h1_1_h2_1")?;
    check_h1_h2(profile, 1, 1)?;
    match try_h11h21_over(profile, q)? {
        Some(built) => Ok(built),
        None => Err(ConstructError::ParameterSelectionFailure {
            constraint: format!(
                "q = {q} admits no subgroup of size >= {} with >= {} cosets",
                profile.n2, profile.t2
            ),
        }),
    }
}

fn check_h1_h2(p: &CodeProfile, h1: usize, h2: usize) -> Result<(), ConstructError> {
    if p.h1 != h1 || p.h2 != h2 {
        return Err(ConstructError::WrongFamily(format!(
            "this family needs h1 = {h1}, h2 = {h2}; profile has h1 = {}, h2 = {}",
            p.h1, p.h2
        )));
    }
    Ok(())
}

fn tower_for(q: u64) -> Result<Arc<FieldTower>, ConstructError> {
    let (char_p, e) = arith::prime_power(q).ok_or(ConstructError::ParameterSelectionFailure {
        constraint: format!("{q} is not a prime power"),
    })?;
    Ok(Arc::new(if e > 1 {
        FieldTower::with_canonical_moduli(char_p, &[e as usize])?
    } else {
        FieldTower::prime(char_p)?
    }))
}

fn try_h11h21_over(p: &CodeProfile, q: u64) -> Result<Option<ConstructedCode>, ConstructError> {
    let tower = tower_for(q)?;
    let level = tower.top_level();
    let group = match tower.find_subgroup(level, p.n2 as u64, p.t2 as u64) {
        Ok(g) => g,
        Err(_) => return Ok(None),
    };
    let mut members: Vec<Element> = group.members(&tower);
    members.sort_by_key(|e| tower.index(e));
    let alphas: Vec<Element> = members.into_iter().take(p.n2).collect();
    let lambdas: Vec<Element> = group.coset_reps.iter().take(p.t2).cloned().collect();

    let m0 = vandermonde(&tower, level, &alphas, p.delta, 1)?;
    let mid_block = |s: usize| {
        FMatrix::from_fn(tower.clone(), level, 1, p.n2, |_, _| lambdas[s].clone())
            .expect("constant mid row")
    };
    let global_row = vandermonde(&tower, level, &alphas, 1, p.delta + 1)?;
    let global_block = |_i: usize, _s: usize| global_row.clone();
    let pc = assemble(
        p,
        Family::H11H21,
        &m0,
        &mid_block,
        &global_block,
        level,
        level,
        level,
    )?;
    let certificate = certify_exhaustive(&pc)?;
    Ok(Some(ConstructedCode {
        code: pc,
        certificate,
    }))
}

/// Two global parities and one mid parity (h1 = 2, h2 = 1) with Cauchy
/// blocks. Parameter search follows a fixed deterministic order: ascending
/// prime powers q0 >= 2(n2+delta)+3; within q0, admissible subgroups by
/// descending order; beta triples and alpha candidates in canonical field
/// order; first fit wins.
pub fn construct_h1_2_h2_1(profile: &CodeProfile) -> Result<ConstructedCode, ConstructError> {
    super::expect_hl(profile, "construct_h1_2_h2_1")?;
    check_h1_h2(profile, 2, 1)?;
    let p = profile;
    let q0_min = 2 * (p.n2 + p.delta) as u64 + 3;
    let mut deepest = format!(
        "no prime power q0 in {q0_min}..={FIELD_SEARCH_CAP} admits a subgroup of size >= {} with >= {} cosets",
        p.n2 + 2,
        p.t1 * p.t2
    );
    for q0 in arith::prime_powers_from(q0_min) {
        if q0 > FIELD_SEARCH_CAP {
            break;
        }
        let tower = tower_for(q0)?;
        let level = tower.top_level();
        let mut orders: Vec<u64> = arith::divisors((q0 - 1) as u128)
            .into_iter()
            .map(|d| d as u64)
            .filter(|&d| d >= (p.n2 + 2) as u64 && (q0 - 1) / d >= (p.t1 * p.t2) as u64)
            .collect();
        orders.sort_unstable_by(|a, b| b.cmp(a));
        for order in orders {
            let group = tower.find_subgroup(level, order, (q0 - 1) / order)?;
            debug_assert_eq!(group.order, order);
            // O(1) membership by element index
            let mut in_g = vec![false; q0 as usize];
            for m in group.members(&tower) {
                in_g[tower.index(&m) as usize] = true;
            }
            deepest = format!(
                "q0 = {q0}, |G| = {order}: no beta triple admits {} alpha values with both Cauchy ratios in G",
                p.n2
            );
            if let Some(built) = try_h12h21_assignment(p, &tower, level, &group, &in_g)? {
                return Ok(built);
            }
        }
    }
    Err(ConstructError::ParameterSelectionFailure {
        constraint: deepest,
    })
}

fn try_h12h21_assignment(
    p: &CodeProfile,
    tower: &Arc<FieldTower>,
    level: usize,
    group: &crate::field::SubgroupHandle,
    in_g: &[bool],
) -> Result<Option<ConstructedCode>, ConstructError> {
    let q0 = tower.size(level) as u64;
    let elems: Vec<Element> = (0..q0)
        .map(|i| tower.from_index(level, i as u128).unwrap())
        .collect();
    for b1 in 0..q0 as usize {
        for b2 in 0..q0 as usize {
            if b2 == b1 {
                continue;
            }
            for b3 in 0..q0 as usize {
                if b3 == b1 || b3 == b2 {
                    continue;
                }
                // alpha candidates: both (x-b2)/(x-b3) and (x-b1)/(x-b3) in G
                let mut alphas = Vec::with_capacity(p.n2);
                for (xi, x) in elems.iter().enumerate() {
                    if xi == b1 || xi == b2 || xi == b3 {
                        continue;
                    }
                    let d3 = tower.inv(&tower.sub(x, &elems[b3])).expect("x != b3");
                    let r2 = tower.mul(&tower.sub(x, &elems[b2]), &d3);
                    let r1 = tower.mul(&tower.sub(x, &elems[b1]), &d3);
                    if in_g[tower.index(&r2) as usize] && in_g[tower.index(&r1) as usize] {
                        alphas.push(x.clone());
                        if alphas.len() == p.n2 {
                            break;
                        }
                    }
                }
                if alphas.len() < p.n2 {
                    continue;
                }
                if let Some(built) =
                    finish_h12h21(p, tower, level, group, &alphas, [b1, b2, b3])?
                {
                    return Ok(Some(built));
                }
            }
        }
    }
    Ok(None)
}

fn finish_h12h21(
    p: &CodeProfile,
    tower: &Arc<FieldTower>,
    level: usize,
    group: &crate::field::SubgroupHandle,
    alphas: &[Element],
    b: [usize; 3],
) -> Result<Option<ConstructedCode>, ConstructError> {
    let q0 = tower.size(level) as u64;
    // beta_1..beta_delta: canonical order, disjoint from alphas and the triple
    let used: std::collections::HashSet<u128> = alphas
        .iter()
        .map(|a| tower.index(a))
        .chain(b.iter().map(|&x| x as u128))
        .collect();
    let mut betas: Vec<Element> = Vec::with_capacity(p.delta);
    for i in 0..q0 as u128 {
        if betas.len() == p.delta {
            break;
        }
        if !used.contains(&i) {
            betas.push(tower.from_index(level, i)?);
        }
    }
    if betas.len() < p.delta {
        return Ok(None);
    }
    let b1 = tower.from_index(level, b[0] as u128)?;
    let b2 = tower.from_index(level, b[1] as u128)?;
    let b3 = tower.from_index(level, b[2] as u128)?;

    let mus: Vec<Element> = group.coset_reps.iter().take(p.t1 * p.t2).cloned().collect();
    if mus.len() < p.t1 * p.t2 {
        return Ok(None);
    }

    // lambdas: 4-wise independent over F_q0, from an extension
    let count = p.t1 * p.t2;
    let req = KWiseRequest {
        base_level: level,
        count,
        k: 4.min(count),
        max_extension_degree: 4,
    };
    let set = generate(tower, &req)?;
    let top_tower = set.tower.clone();
    let global_level = set.elems()[0].level();
    let lambdas = set.elems().to_vec();

    let m0 = cauchy(&top_tower, level, alphas, &betas)?;
    let mid_row = cauchy(&top_tower, level, alphas, std::slice::from_ref(&b1))?;
    let mid_block = |_s: usize| mid_row.clone();
    let row2 = cauchy(&top_tower, level, alphas, std::slice::from_ref(&b2))?;
    let row3 = cauchy(&top_tower, level, alphas, std::slice::from_ref(&b3))?;
    let global_block = |i: usize, s: usize| {
        let flat = i * p.t2 + s;
        let l = row2.scale(&lambdas[flat]);
        let m = row3.scale(&mus[flat]);
        l.vstack(&m).expect("2-row global block")
    };
    let pc = assemble(
        p,
        Family::H12H21,
        &m0,
        &mid_block,
        &global_block,
        level,
        level,
        global_level,
    )?;
    match certify_exhaustive(&pc) {
        Ok(mut certificate) => {
            certificate.notes.push(format!(
                "q0 = {q0}, |G| = {}, beta indices {:?}",
                group.order, b
            ));
            Ok(Some(ConstructedCode {
                code: pc,
                certificate,
            }))
        }
        // sound by the family theorem when the constraints hold; treat a
        // verification failure as this assignment not working and move on
        Err(ConstructError::CertificationFailed(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
