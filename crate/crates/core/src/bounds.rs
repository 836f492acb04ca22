//! Closed-form evaluators for the minimum-distance bounds and the field-size
//! lower bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::binomial;
use crate::code::CodeProfile;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
}

/// d <= n - k + 1 - (ceil(k/r) - 1)(delta - 1) for (r, delta) locality.
pub fn dmin_upper_rdelta(
    n: usize,
    k: usize,
    r: usize,
    delta_param: usize,
) -> Result<i64, BoundsError> {
    if r == 0 || k == 0 || r > k || k > n {
        return Err(BoundsError::ParameterRange(format!(
            "need 1 <= r <= k <= n, got r={r} k={k} n={n}"
        )));
    }
    let groups = k.div_ceil(r) as i64;
    Ok((n - k + 1) as i64 - (groups - 1) * (delta_param as i64 - 1))
}

/// Minimum distance of a data-local MRC: h + delta + 1.
pub fn dmin_data_local(h: usize, delta: usize) -> usize {
    h + delta + 1
}

/// Minimum distance of a local MRC: h + delta + 1 + floor(h/r) * delta.
pub fn dmin_local(h: usize, r: usize, delta: usize) -> Result<usize, BoundsError> {
    if r == 0 {
        return Err(BoundsError::ParameterRange("r must be positive".into()));
    }
    Ok(h + delta + 1 + (h / r) * delta)
}

/// Two-level hierarchical locality bound:
/// d <= n - k + 1 - (ceil(k/r2) - 1)(delta2 - 1) - (ceil(k/r1) - 1)(delta1 - delta2).
pub fn dmin_upper_hier(
    n: usize,
    k: usize,
    r1: usize,
    r2: usize,
    delta1: usize,
    delta2: usize,
) -> Result<i64, BoundsError> {
    if r2 == 0 || r2 > r1 || r1 > k || k > n {
        return Err(BoundsError::ParameterRange(format!(
            "need 1 <= r2 <= r1 <= k <= n, got r1={r1} r2={r2} k={k} n={n}"
        )));
    }
    let g2 = k.div_ceil(r2) as i64;
    let g1 = k.div_ceil(r1) as i64;
    Ok((n - k + 1) as i64
        - (g2 - 1) * (delta2 as i64 - 1)
        - (g1 - 1) * (delta1 as i64 - delta2 as i64))
}

/// Minimum distance of an HDL-MRC: h1 + h2 + delta + 1.
pub fn dmin_hdl(h1: usize, h2: usize, delta: usize) -> usize {
    h1 + h2 + delta + 1
}

/// One field-size lower bound evaluation. `value` is the smallest integer q
/// consistent with the bound, meaningful only when `applicable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: i64,
    pub applicable: bool,
    pub precondition_failures: Vec<String>,
    pub assumptions: Vec<String>,
}

impl BoundResult {
    fn inapplicable(failures: Vec<String>) -> Self {
        BoundResult {
            value: 0,
            applicable: false,
            precondition_failures: failures,
            assumptions: Vec::new(),
        }
    }
}

/// ceil of (t1t2/denom - 1) * binom - 4 over the integers.
fn bound_value(t1t2: u128, denom: u128, binom: u128) -> i64 {
    // (t1t2 - denom) * binom - 4*denom, all over denom, rounded up
    let num = (t1t2 as i128 - denom as i128) * binom as i128 - 4 * denom as i128;
    let den = denom as i128;
    (num.div_euclid(den) + if num.rem_euclid(den) != 0 { 1 } else { 0 }) as i64
}

fn thm_common(_p: &CodeProfile) -> Vec<String> {
    // the undecorated r in the binomials is read as r2
    vec!["binomial radius r read as r2".into()]
}

/// Regime (delta+2) <= h1+h2, h1 <= t1, h2 <= t2 - 1:
/// q >= (t1t2/(h1h2+h1-1) - 1) C(r2+delta, delta+1) - 4.
pub fn field_size_lb_moderate_h1(p: &CodeProfile) -> BoundResult {
    let mut failures = Vec::new();
    if p.h1 + p.h2 < p.delta + 2 {
        failures.push(format!(
            "(delta+2) <= h1+h2 fails: {} > {}",
            p.delta + 2,
            p.h1 + p.h2
        ));
    }
    if p.h1 > p.t1 {
        failures.push(format!("h1 <= n/n1 fails: {} > {}", p.h1, p.t1));
    }
    if p.h2 + 1 > p.t2 {
        failures.push(format!("h2 <= n1/n2 - 1 fails: {} > {}", p.h2, p.t2 - 1));
    }
    if !failures.is_empty() {
        return BoundResult::inapplicable(failures);
    }
    let denom = (p.h1 * p.h2 + p.h1 - 1) as u128;
    let b = binomial((p.r2 + p.delta) as u64, (p.delta + 1) as u64);
    BoundResult {
        value: bound_value((p.t1 * p.t2) as u128, denom, b),
        applicable: true,
        precondition_failures: Vec::new(),
        assumptions: thm_common(p),
    }
}

/// Regime 4 <= h1+h2 <= delta+2, h1 <= t1, h2 <= t2 - 1:
/// q >= (t1t2/(h1h2+h1-1) - 1) C(r2+h1+h2-2, h1+h2-1) - 4.
pub fn field_size_lb_small_sum(p: &CodeProfile) -> BoundResult {
    let mut failures = Vec::new();
    if p.h1 + p.h2 < 4 {
        failures.push(format!("4 <= h1+h2 fails: h1+h2 = {}", p.h1 + p.h2));
    }
    if p.h1 + p.h2 > p.delta + 2 {
        failures.push(format!(
            "h1+h2 <= delta+2 fails: {} > {}",
            p.h1 + p.h2,
            p.delta + 2
        ));
    }
    if p.h1 > p.t1 {
        failures.push(format!("h1 <= n/n1 fails: {} > {}", p.h1, p.t1));
    }
    if p.h2 + 1 > p.t2 {
        failures.push(format!("h2 <= n1/n2 - 1 fails: {} > {}", p.h2, p.t2 - 1));
    }
    if !failures.is_empty() {
        return BoundResult::inapplicable(failures);
    }
    let denom = (p.h1 * p.h2 + p.h1 - 1) as u128;
    let b = binomial(
        (p.r2 + p.h1 + p.h2 - 2) as u64,
        (p.h1 + p.h2 - 1) as u64,
    );
    BoundResult {
        value: bound_value((p.t1 * p.t2) as u128, denom, b),
        applicable: true,
        precondition_failures: Vec::new(),
        assumptions: thm_common(p),
    }
}

/// Regime (delta+2) <= h1+h2, h1 > t1, h2 <= t2 - ceil(h1/t1):
/// q >= (t1t2/(t1 h2 + h1 - 1) - 1) C(r2+delta, delta+1) - 4.
pub fn field_size_lb_large_h1(p: &CodeProfile) -> BoundResult {
    let mut failures = Vec::new();
    if p.h1 + p.h2 < p.delta + 2 {
        failures.push(format!(
            "(delta+2) <= h1+h2 fails: {} > {}",
            p.delta + 2,
            p.h1 + p.h2
        ));
    }
    if p.h1 <= p.t1 {
        failures.push(format!("h1 > n/n1 fails: {} <= {}", p.h1, p.t1));
    }
    let ceil_ratio = p.h1.div_ceil(p.t1.max(1));
    if p.h2 + ceil_ratio > p.t2 {
        failures.push(format!(
            "h2 <= n1/n2 - ceil(h1/t1) fails: {} > {}",
            p.h2,
            p.t2 as i64 - ceil_ratio as i64
        ));
    }
    if !failures.is_empty() {
        return BoundResult::inapplicable(failures);
    }
    let denom = (p.t1 * p.h2 + p.h1 - 1) as u128;
    let b = binomial((p.r2 + p.delta) as u64, (p.delta + 1) as u64);
    BoundResult {
        value: bound_value((p.t1 * p.t2) as u128, denom, b),
        applicable: true,
        precondition_failures: Vec::new(),
        assumptions: thm_common(p),
    }
}

/// Best applicable field-size lower bound across the three regimes;
/// inapplicable (with the named unmet conditions) when no regime matches.
pub fn field_size_lb(p: &CodeProfile) -> BoundResult {
    let results = [
        field_size_lb_moderate_h1(p),
        field_size_lb_small_sum(p),
        field_size_lb_large_h1(p),
    ];
    let best = results
        .iter()
        .filter(|r| r.applicable)
        .max_by_key(|r| r.value);
    match best {
        Some(r) => r.clone(),
        None => {
            let failures = results
                .iter()
                .flat_map(|r| r.precondition_failures.iter().cloned())
                .collect();
            BoundResult::inapplicable(failures)
        }
    }
}
