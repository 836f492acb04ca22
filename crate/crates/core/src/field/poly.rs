//! Dense polynomials over a tower level, used for modulus validation and the
//! canonical irreducible search. Coefficients are prime-field coordinate
//! vectors of elements at the given level, ascending degree.

use super::FieldTower;

type Coeffs = Vec<Vec<u64>>;

fn trim(tower: &FieldTower, f: &mut Coeffs) {
    while f.len() > 1 && FieldTower::slice_is_zero(f.last().unwrap()) {
        f.pop();
    }
    let _ = tower;
}

fn deg(f: &Coeffs) -> usize {
    f.len() - 1
}

fn is_zero(f: &Coeffs) -> bool {
    f.iter().all(|c| FieldTower::slice_is_zero(c))
}

fn zero_coeff(tower: &FieldTower, level: usize) -> Vec<u64> {
    vec![0; tower.coord_len(level)]
}

fn x_poly(tower: &FieldTower, level: usize) -> Coeffs {
    let mut one = zero_coeff(tower, level);
    one[0] = 1;
    vec![zero_coeff(tower, level), one]
}

fn mul(tower: &FieldTower, level: usize, a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut out = vec![zero_coeff(tower, level); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if FieldTower::slice_is_zero(ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if FieldTower::slice_is_zero(bj) {
                continue;
            }
            let prod = tower.mul_slices(level, ai, bj);
            tower.add_into(&mut out[i + j], &prod);
        }
    }
    trim(tower, &mut out);
    out
}

fn sub_assign(tower: &FieldTower, a: &mut Coeffs, b: &Coeffs) {
    let p = tower.characteristic();
    while a.len() < b.len() {
        a.push(vec![0; a[0].len()]);
    }
    for (ac, bc) in a.iter_mut().zip(b.iter()) {
        for (x, y) in ac.iter_mut().zip(bc.iter()) {
            *x = (*x + p - *y) % p;
        }
    }
    trim(tower, a);
}

/// Remainder of a by b; b need not be monic.
fn rem(tower: &FieldTower, level: usize, a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut r = a.clone();
    trim(tower, &mut r);
    let db = deg(b);
    let lead_inv = tower.inv_slices(level, &b[db]);
    while !is_zero(&r) && deg(&r) >= db {
        let dr = deg(&r);
        let factor = tower.mul_slices(level, &r[dr], &lead_inv);
        // r -= factor * x^(dr-db) * b; the degree-dr term cancels exactly
        let mut sub = vec![zero_coeff(tower, level); dr - db];
        for bc in b.iter() {
            sub.push(tower.mul_slices(level, &factor, bc));
        }
        sub_assign(tower, &mut r, &sub);
        debug_assert!(is_zero(&r) || deg(&r) < dr);
    }
    r
}

fn gcd(tower: &FieldTower, level: usize, a: &Coeffs, b: &Coeffs) -> Coeffs {
    let mut a = a.clone();
    let mut b = b.clone();
    trim(tower, &mut a);
    trim(tower, &mut b);
    while !is_zero(&b) {
        let r = rem(tower, level, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn mulmod(tower: &FieldTower, level: usize, a: &Coeffs, b: &Coeffs, m: &Coeffs) -> Coeffs {
    rem(tower, level, &mul(tower, level, a, b), m)
}

fn powmod(tower: &FieldTower, level: usize, base: &Coeffs, mut e: u128, m: &Coeffs) -> Coeffs {
    let mut result = {
        let mut one = zero_coeff(tower, level);
        one[0] = 1;
        vec![one]
    };
    let mut base = rem(tower, level, base, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(tower, level, &result, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(tower, level, &base, &base, m);
        }
    }
    result
}

/// Rabin irreducibility test for a monic polynomial of degree >= 1 over the
/// level-`level` field of size Q: f is irreducible iff x^(Q^d) = x (mod f) and
/// gcd(x^(Q^(d/r)) - x, f) = 1 for every prime r | d.
pub(super) fn is_irreducible(tower: &FieldTower, level: usize, f: &Coeffs) -> bool {
    let mut f = f.clone();
    trim(tower, &mut f);
    let d = deg(&f);
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if FieldTower::slice_is_zero(&f[0]) {
        return false; // divisible by x
    }
    let q = tower.size(level);
    let x = x_poly(tower, level);
    // frob[i] = x^(Q^i) mod f
    let mut frob = Vec::with_capacity(d + 1);
    frob.push(x.clone());
    for _ in 0..d {
        let next = powmod(tower, level, frob.last().unwrap(), q, &f);
        frob.push(next);
    }
    // x^(Q^d) must equal x mod f
    let mut diff = frob[d].clone();
    sub_assign(tower, &mut diff, &x);
    if !is_zero(&diff) {
        return false;
    }
    for (r, _) in crate::arith::factor(d as u128) {
        let e = d / r as usize;
        let mut g = frob[e].clone();
        sub_assign(tower, &mut g, &x);
        if is_zero(&g) {
            return false;
        }
        let h = gcd(tower, level, &f, &g);
        if deg(&h) != 0 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of the given degree, as
/// coefficient slices (ascending degree, constant term first in the order).
pub(super) fn canonical_irreducible(
    tower: &FieldTower,
    level: usize,
    degree: usize,
) -> Option<Coeffs> {
    let q = tower.size(level);
    let mut digits = vec![0u128; degree]; // digits[0] = c_0 (most significant in lex order)
    digits[0] = 1; // c_0 = 0 implies reducible for degree >= 2
    loop {
        let mut f: Coeffs = digits
            .iter()
            .map(|&idx| tower.unpack(level, idx))
            .collect();
        let mut lead = zero_coeff(tower, level);
        lead[0] = 1;
        f.push(lead);
        if is_irreducible(tower, level, &f) {
            return Some(f);
        }
        // advance (c_0, …, c_(d-1)) in lexicographic order: last digit fastest
        let mut pos = degree;
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < q {
                break;
            }
            digits[pos] = 0;
        }
    }
}
