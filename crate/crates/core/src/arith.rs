//! Small-integer number theory: primes, primality, modular square roots,
//! Chinese remaindering and the "has a prime factor above M" test used by
//! the sieve counters.

use std::sync::OnceLock;

/// Trial-division table limit.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// All primes `<= n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if let (Ok(a64), Ok(b64)) = (u64::try_from(a), u64::try_from(b)) {
        if let Some(prod) = (a64 as u128).checked_mul(b64 as u128) {
            return prod % m;
        }
    }
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

const MR_BASES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first thirteen prime bases. Deterministic below
/// 3.3 * 10^24, which covers every value the sieves produce at desk scale.
pub fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    is_prime_u128(n as u128)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Pollard–Brent: a nontrivial factor of the odd composite `n`.
fn pollard_factor(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| add_mod_u128(mul_mod_u128(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn largest_prime_factor_big(n: u128) -> u128 {
    if n == 1 {
        return 1;
    }
    if is_prime_u128(n) {
        return n;
    }
    let d = pollard_factor(n);
    largest_prime_factor_big(d).max(largest_prime_factor_big(n / d))
}

/// True iff `r` has a prime divisor strictly greater than `m`.
///
/// Zero is *not* handled here: callers decide how to treat a vanishing gcd.
pub fn has_prime_factor_above(r: u128, m: u64) -> bool {
    let m128 = m as u128;
    let mut r = r;
    if r <= m128 {
        return false;
    }
    for &p in trial_primes() {
        let p128 = p as u128;
        if p > m {
            // every prime factor <= m has been stripped and r > m >= 1
            return true;
        }
        if p128 * p128 > r {
            // r is 1 or prime
            return r > m128;
        }
        while r.is_multiple_of(p128) {
            r /= p128;
        }
        if r <= m128 {
            return false;
        }
    }
    // m exceeds the trial table and r has no factor below it.
    largest_prime_factor_big(r) > m128
}

/// Prime factorisation of a positive `u64` as (prime, exponent) pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> usize {
    factor_u64(n).len()
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exact integer square root of a nonnegative perfect square, else `None`.
pub fn exact_sqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = isqrt_u128(n as u128) as i128;
    (r * r == n).then_some(r)
}

pub fn is_perfect_square(n: i64) -> bool {
    exact_sqrt_i128(n as i128).is_some()
}

/// Least nonnegative residue.
pub fn modp(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = modp(a as i128, p);
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks), if any.
pub fn sqrt_mod_prime(a: i64, p: u64) -> Option<u64> {
    let a = modp(a as i128, p);
    if p == 2 {
        return Some(a);
    }
    if a == 0 {
        return Some(0);
    }
    if legendre(a as i64, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while legendre(z as i64, p) != -1 {
        z += 1;
    }
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    Some(r)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

/// Chinese remaindering for pairwise coprime moduli; returns the residue in
/// `[0, prod)` and the product of the moduli.
pub fn crt(residues: &[i128], moduli: &[i128]) -> (i128, i128) {
    let mut acc = 0i128;
    let mut modulus = 1i128;
    for (&r, &m) in residues.iter().zip(moduli) {
        let inv = inv_mod(modulus, m).expect("moduli must be pairwise coprime");
        let t = ((r - acc).rem_euclid(m) * inv).rem_euclid(m);
        acc += modulus * t;
        modulus *= m;
    }
    (acc.rem_euclid(modulus), modulus)
}
