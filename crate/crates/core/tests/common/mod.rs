//! Independent oracles shared by the integration tests. Everything here is a
//! direct sweep or a textbook algorithm, written without the library's
//! shortcuts.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use qsieve_core::{IntegerPolynomial, QuadraticForm};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn form(s: &str) -> QuadraticForm {
    QuadraticForm::parse(s).unwrap()
}

/// Calls `f` at every point of `[lo, hi]^n`.
pub fn for_each_point(n: usize, lo: i64, hi: i64, mut f: impl FnMut(&[i64])) {
    if hi < lo {
        return;
    }
    let mut x = vec![lo; n];
    loop {
        f(&x);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if x[k] < hi {
                x[k] += 1;
                break;
            }
            x[k] = lo;
        }
    }
}

/// `x^T A x / 2` from the doubled matrix, recomputed from scratch.
pub fn q_value(q: &QuadraticForm, x: &[i64]) -> i128 {
    let a = q.doubled_matrix();
    let mut s = 0i128;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += a[i][j] as i128 * x[i] as i128 * x[j] as i128;
        }
    }
    s / 2
}

/// Zeros of `q` in `[-B, B]^n` with `x ≡ a (mod modulus)`, by full sweep.
pub fn brute_points(q: &QuadraticForm, bound: i64, modulus: i64, a: &[i64]) -> u64 {
    let mut c = 0;
    for_each_point(q.n_vars(), -bound, bound, |x| {
        let in_class = x.iter().zip(a).all(|(v, r)| (v - r).rem_euclid(modulus) == 0);
        if in_class && q_value(q, x) == 0 {
            c += 1;
        }
    });
    c
}

/// Zeros of `q` modulo `m`, by full sweep of `(Z/mZ)^n`.
pub fn brute_nu(q: &QuadraticForm, m: i64) -> u64 {
    let mut c = 0;
    for_each_point(q.n_vars(), 0, m - 1, |x| {
        if q_value(q, x).rem_euclid(m as i128) == 0 {
            c += 1;
        }
    });
    c
}

/// Univariate polynomial over `F_p`, lowest degree first, trailing zeros
/// trimmed.
pub fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let r = (a as i64).extended_gcd(&(p as i64));
    r.x.rem_euclid(p as i64) as u64
}

/// Degree of `gcd(a, b)` over `F_p`; `None` if both are zero.
pub fn gcd_degree_mod_p(a: &[u64], b: &[u64], p: u64) -> Option<usize> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        // a <- a mod b
        let lead_inv = inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let factor = a.last().unwrap() * lead_inv % p;
            for (i, &c) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + p - factor * c % p) % p;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

/// Reduces the coefficients in `var` of `f` at the point `x` modulo `p`.
pub fn specialize_mod_p(f: &IntegerPolynomial, var: usize, x: &[i64], p: u64) -> Vec<u64> {
    f.coefficients_in(var)
        .iter()
        .map(|c| c.eval_i64(x).mod_floor(&BigInt::from(p)).to_u64().unwrap())
        .collect()
}

/// Random polynomial with `terms` terms, each variable of degree at most
/// `max_deg`, total degree at most `max_total`, coefficients in `[-c, c]`.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, terms: usize, max_deg: u32, max_total: u32, c: i64) -> IntegerPolynomial {
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0u32; n];
        let mut left = max_total;
        for slot in e.iter_mut() {
            let d = rng.gen_range(0..=max_deg.min(left));
            *slot = d;
            left -= d;
        }
        let coeff = rng.gen_range(-c..=c);
        out.push((e, coeff));
    }
    IntegerPolynomial::from_terms(n, out)
}

/// Zeros of `f` in `[-B, B]^n` by full sweep.
pub fn brute_zeros_box(f: &IntegerPolynomial, bound: i64) -> u128 {
    let mut c = 0;
    for_each_point(f.n_vars(), -bound, bound, |x| {
        if f.eval_i64(x).is_zero() {
            c += 1;
        }
    });
    c
}

/// Points of `(0, p]^n` with `p | f(x)` by full sweep.
pub fn brute_zeros_mod_p(f: &IntegerPolynomial, p: u64) -> u128 {
    let mut c = 0;
    let pb = BigInt::from(p);
    for_each_point(f.n_vars(), 1, p as i64, |x| {
        if f.eval_i64(x).mod_floor(&pb).is_zero() {
            c += 1;
        }
    });
    c
}

/// Projective points of a nonsingular conic over `F_p`, odd `p`.
pub fn conic_points(p: u64) -> usize {
    (p + 1) as usize
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)).collect()
}

pub fn legendre(a: i64, p: u64) -> i64 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    // Euler's criterion by repeated multiplication
    let mut r = 1u64;
    for _ in 0..(p - 1) / 2 {
        r = r * a % p;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}
