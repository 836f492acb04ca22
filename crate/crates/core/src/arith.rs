//! Integer helpers: primality, factoring, divisors, prime powers, binomials.

/// Deterministic Miller-Rabin for u128 (bases valid for n < 3.3 * 10^24).
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mod_mul(a: u128, b: u128, m: u128) -> u128 {
    // Schoolbook splitting to avoid overflow past u128.
    if let Some(v) = a.checked_mul(b) {
        return v % m;
    }
    let mut result = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn mod_pow(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Pollard's rho with Brent cycling; `n` must be composite and odd.
fn pollard_rho(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mod_mul(x, x, n) + c) % n;
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Prime factorization as (prime, multiplicity) pairs, ascending.
pub fn factor(mut n: u128) -> Vec<(u128, u32)> {
    let mut out: Vec<(u128, u32)> = Vec::new();
    let push = |p: u128, out: &mut Vec<(u128, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += 1,
        None => out.push((p, 1)),
    };
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
        while n.is_multiple_of(p) {
            push(p, &mut out);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u128) -> Vec<u128> {
    let mut out = vec![1u128];
    for (p, e) in factor(n) {
        let prev = out.clone();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Decompose a prime power q = p^e; None if q is not a prime power (or q < 2).
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factor(q as u128);
    if f.len() == 1 {
        Some((f[0].0 as u64, f[0].1))
    } else {
        None
    }
}

/// Smallest prime power strictly greater than `n`.
pub fn next_prime_power(n: u64) -> u64 {
    let mut q = n + 1;
    loop {
        if prime_power(q).is_some() {
            return q;
        }
        q += 1;
    }
}

/// Prime powers q >= start, ascending.
pub fn prime_powers_from(start: u64) -> impl Iterator<Item = u64> {
    (start.max(2)..).filter(|&q| prime_power(q).is_some())
}

/// Smallest m >= 1 with base^m >= x (base >= 2, x >= 1).
pub fn ceil_log(base: u128, x: u128) -> u32 {
    assert!(base >= 2 && x >= 1);
    let mut m = 1u32;
    let mut acc = base;
    while acc < x {
        acc = acc.saturating_mul(base);
        m += 1;
    }
    m
}

/// Binomial coefficient as u128; saturates are not expected at desk scale.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
