//! Counts of zeros of a quadratic form modulo prime powers, the local
//! densities they converge to, and the coprimality densities built on them.
//!
//! For an odd prime at which the form is nonsingular, zeros modulo `p^k`
//! split into lifts of smooth zeros modulo `p` (each smooth zero lifts to
//! `p^(k-1)(n-1)` classes) and multiples of `p` (which rescale to zeros modulo
//! `p^(k-2)`). The resulting two-step recursion is solved in closed form, so
//! limits at such primes are exact. Everywhere else values are honest
//! truncations at a stated level.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::{check_cap, Error, Result};
use crate::exec::{fold_grid, Axis, ExecMode};
use crate::poly::IntegerPolynomial;
use crate::quadform::QuadraticForm;

/// Default cap on residue evaluations per call.
pub const DEFAULT_RESIDUE_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DensityConfig {
    pub cap: u128,
    pub mode: ExecMode,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { cap: DEFAULT_RESIDUE_CAP, mode: ExecMode::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityMethod {
    BruteForce,
    SmoothSingularRecursion,
    ClosedForm,
}

impl fmt::Display for DensityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DensityMethod::BruteForce => "brute_force",
            DensityMethod::SmoothSingularRecursion => "recursion",
            DensityMethod::ClosedForm => "closed_form",
        })
    }
}

/// An exact density together with how it was obtained. `stabilized` is set
/// only when `value` is the limit itself, certified by the recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityValue {
    pub p: u64,
    pub k_used: u32,
    pub value: BigRational,
    pub stabilized: bool,
    pub method: DensityMethod,
}

impl DensityValue {
    pub const CSV_HEADER: &'static str = "p,k_used,method,value_num,value_den,value_decimal,stabilized";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.p,
            self.k_used,
            self.method,
            self.value.numer(),
            self.value.denom(),
            decimal(&self.value),
            self.stabilized
        )
    }
}

/// 12 significant digits.
pub fn decimal(r: &BigRational) -> String {
    let v = r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN);
    let v = if v.is_finite() { v } else { ratio_to_f64(r) };
    format!("{}", format!("{v:.11e}").parse::<f64>().unwrap_or(v))
}

/// Converts a rational with possibly huge parts to the nearest-ish `f64`.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
    if shift <= 0 {
        return r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap();
    }
    let n = (r.numer() >> shift as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift as usize).to_f64().unwrap_or(0.0);
    n / d
}

fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn rat(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn pow_u128(b: u128, e: u32) -> Option<u128> {
    (0..e).try_fold(1u128, |acc, _| acc.checked_mul(b))
}

/// Odd `p` at which the doubled matrix stays invertible.
pub fn is_nonsingular_mod_p(q: &QuadraticForm, p: u64) -> bool {
    p % 2 == 1 && q.rank_mod_p(p) == q.n_vars()
}

/// The form reduced modulo `p`, with a plan for solving one variable.
struct ResidueForm {
    p: u64,
    n: usize,
    diag: Vec<u64>,
    off: Vec<(usize, usize, u64)>,
    solve: ResidueSolve,
}

#[derive(Clone, Copy)]
enum ResidueSolve {
    /// Unit diagonal coefficient on `v` (odd `p`): quadratic formula.
    Quadratic(usize),
    /// Unit cross coefficient on `v` and zero diagonal: linear.
    Linear(usize),
    /// Try every residue of `v` (small `p` or the zero form).
    Exhaust(usize),
}

impl ResidueForm {
    fn new(q: &QuadraticForm, p: u64) -> Self {
        let n = q.n_vars();
        let pi = p as i128;
        let mut diag = vec![0u64; n];
        let mut off = Vec::new();
        for ((i, j), c) in q.coeffs() {
            let c = (c as i128).rem_euclid(pi) as u64;
            if c == 0 {
                continue;
            }
            if i == j {
                diag[i] = c;
            } else {
                off.push((i, j, c));
            }
        }
        let solve = if p == 2 {
            ResidueSolve::Exhaust(0)
        } else if let Some(v) = (0..n).find(|&v| diag[v] != 0) {
            ResidueSolve::Quadratic(v)
        } else if let Some(&(v, _, _)) = off.first() {
            ResidueSolve::Linear(v)
        } else {
            ResidueSolve::Exhaust(0)
        };
        ResidueForm { p, n, diag, off, solve }
    }

    fn var(&self) -> usize {
        match self.solve {
            ResidueSolve::Quadratic(v) | ResidueSolve::Linear(v) | ResidueSolve::Exhaust(v) => v,
        }
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p as u128;
        let mut acc = 0u128;
        for (i, &c) in self.diag.iter().enumerate() {
            if c != 0 {
                acc += c as u128 * (x[i] as u128 * x[i] as u128 % p) % p;
            }
        }
        for &(i, j, c) in &self.off {
            acc += c as u128 * (x[i] as u128 * x[j] as u128 % p) % p;
        }
        (acc % p) as u64
    }

    /// `(L, R)` with `Q = a x_v^2 + L x_v + R` modulo `p`.
    fn split(&self, x: &[u64], v: usize) -> (u64, u64) {
        let p = self.p as u128;
        let mut l = 0u128;
        let mut r = 0u128;
        for (i, &c) in self.diag.iter().enumerate() {
            if c != 0 && i != v {
                r += c as u128 * (x[i] as u128 * x[i] as u128 % p) % p;
            }
        }
        for &(i, j, c) in &self.off {
            if i == v {
                l += c as u128 * x[j] as u128 % p;
            } else if j == v {
                l += c as u128 * x[i] as u128 % p;
            } else {
                r += c as u128 * (x[i] as u128 * x[j] as u128 % p) % p;
            }
        }
        ((l % p) as u64, (r % p) as u64)
    }
}

/// Folds over every zero of `q` modulo `p` (residues in `[0, p)`), sweeping
/// `p^(n-1)` classes and solving the last variable.
pub(crate) fn fold_zeros_mod_p<T, ID, F, R>(q: &QuadraticForm, p: u64, cfg: &DensityConfig, identity: ID, fold_op: F, reduce_op: R) -> Result<T>
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, &[u64]) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let form = ResidueForm::new(q, p);
    let n = form.n;
    let work = pow_u128(p as u128, n as u32 - 1).unwrap_or(u128::MAX);
    check_cap(work, cfg.cap)?;
    let v = form.var();
    let rest: Vec<usize> = (0..n).filter(|&k| k != v).collect();
    let axes = vec![Axis::new(0, p as i64 - 1); rest.len()];
    let sqrt_table: Vec<Option<u64>> = match form.solve {
        ResidueSolve::Quadratic(_) => {
            let mut t = vec![None; p as usize];
            for s in 0..p {
                t[(s * s % p) as usize].get_or_insert(s);
            }
            t
        }
        _ => Vec::new(),
    };
    let pi = p as u128;
    let out = fold_grid(
        cfg.mode,
        &axes,
        || (identity(), vec![0u64; n]),
        |(mut acc, mut x), pt| {
            for (&k, &val) in rest.iter().zip(pt) {
                x[k] = val as u64;
            }
            match form.solve {
                ResidueSolve::Exhaust(v) => {
                    for t in 0..p {
                        x[v] = t;
                        if form.eval(&x) == 0 {
                            acc = fold_op(acc, &x);
                        }
                    }
                }
                ResidueSolve::Linear(v) => {
                    let (l, r) = form.split(&x, v);
                    if l == 0 {
                        if r == 0 {
                            for t in 0..p {
                                x[v] = t;
                                acc = fold_op(acc, &x);
                            }
                        }
                    } else {
                        let inv = arith::pow_mod(l, p - 2, p) as u128;
                        x[v] = ((pi - r as u128) % pi * inv % pi) as u64;
                        acc = fold_op(acc, &x);
                    }
                }
                ResidueSolve::Quadratic(v) => {
                    let a = form.diag[v] as u128;
                    let (l, r) = form.split(&x, v);
                    let (l, r) = (l as u128, r as u128);
                    let disc = (l * l % pi + pi * pi - 4 * a % pi * r % pi) % pi;
                    if let Some(s) = sqrt_table[disc as usize] {
                        let inv2a = arith::pow_mod((2 * a % pi) as u64, p - 2, p) as u128;
                        let s = s as u128;
                        let r1 = (pi - l + s) % pi * inv2a % pi;
                        x[v] = r1 as u64;
                        acc = fold_op(acc, &x);
                        if s != 0 {
                            let r2 = (2 * pi - l - s) % pi * inv2a % pi;
                            x[v] = r2 as u64;
                            acc = fold_op(acc, &x);
                        }
                    }
                }
            }
            (acc, x)
        },
        |(a, x), (b, _)| (reduce_op(a, b), x),
    );
    Ok(out.0)
}

/// Number of zeros of `q` modulo the prime `p`.
pub fn zeros_mod_p(q: &QuadraticForm, p: u64, cfg: &DensityConfig) -> Result<u64> {
    fold_zeros_mod_p(q, p, cfg, || 0u64, |c, _| c + 1, |a, b| a + b)
}

/// `nu(p^k)` by sweeping residues modulo `p^k`. When some variable has no
/// square term the last variable is counted through its linear congruence;
/// otherwise every residue of every variable is tried.
pub fn nu_brute(q: &QuadraticForm, p: u64, k: u32, cfg: &DensityConfig) -> Result<BigInt> {
    let n = q.n_vars();
    let m = pow_u128(p as u128, k)
        .filter(|&m| m < i64::MAX as u128)
        .ok_or(Error::CapExceeded { needed: u128::MAX, cap: cfg.cap })?;
    let mi = m as i128;
    let linear_var = (0..n).find(|&v| (q.coeff(v, v) as i128) % mi == 0);
    let swept = if linear_var.is_some() { n - 1 } else { n };
    let work = pow_u128(m, swept as u32).unwrap_or(u128::MAX);
    check_cap(work, cfg.cap)?;
    let terms: Vec<(usize, usize, i128)> = q.coeffs().map(|((i, j), c)| (i, j, (c as i128).rem_euclid(mi))).collect();
    let rest: Vec<usize> = (0..n).filter(|&k| Some(k) != linear_var).collect();
    let axes = vec![Axis::new(0, m as i64 - 1); rest.len()];
    let count = fold_grid(
        cfg.mode,
        &axes,
        || (0u128, vec![0i128; n]),
        |(mut c, mut x), pt| {
            for (&k, &v) in rest.iter().zip(pt) {
                x[k] = v as i128;
            }
            match linear_var {
                None => {
                    let val = terms.iter().fold(0i128, |acc, &(i, j, c)| (acc + c * (x[i] * x[j] % mi)) % mi);
                    c += (val == 0) as u128;
                }
                Some(v) => {
                    let mut l = 0i128;
                    let mut r = 0i128;
                    for &(i, j, cf) in &terms {
                        if i == v && j == v {
                            continue;
                        } else if i == v {
                            l = (l + cf * x[j]) % mi;
                        } else if j == v {
                            l = (l + cf * x[i]) % mi;
                        } else {
                            r = (r + cf * (x[i] * x[j] % mi)) % mi;
                        }
                    }
                    // l * y ≡ -r (mod m) has gcd(l, m) solutions when solvable
                    let g = l.gcd(&mi);
                    if r % g == 0 {
                        c += g as u128;
                    }
                }
            }
            (c, x)
        },
        |(a, x), (b, _)| (a + b, x),
    );
    Ok(BigInt::from(count.0))
}

/// `nu(p^k) = #{x mod p^k : Q(x) ≡ 0 mod p^k}`.
pub fn nu(q: &QuadraticForm, p: u64, k: u32) -> Result<BigInt> {
    nu_with(q, p, k, &DensityConfig::default())
}

pub fn nu_with(q: &QuadraticForm, p: u64, k: u32, cfg: &DensityConfig) -> Result<BigInt> {
    if k == 0 {
        return Ok(BigInt::one());
    }
    if is_nonsingular_mod_p(q, p) {
        let nu1 = BigInt::from(zeros_mod_p(q, p, cfg)?);
        return Ok(nu_recursion(&nu1, p, q.n_vars() as u32, k));
    }
    nu_brute(q, p, k, cfg)
}

/// `nu(p^k) = (nu(p) - 1) p^((k-1)(n-1)) + p^n nu(p^(k-2))`, `nu(1) = 1`.
pub fn nu_recursion(nu1: &BigInt, p: u64, n: u32, k: u32) -> BigInt {
    let mut prev2 = BigInt::one(); // nu(p^0)
    let mut prev1 = nu1.clone(); // nu(p^1)
    if k == 0 {
        return prev2;
    }
    for j in 2..=k {
        let next = (nu1 - 1) * pow_big(p, (j - 1) * (n - 1)) + pow_big(p, n) * &prev2;
        prev2 = prev1;
        prev1 = next;
    }
    prev1
}

/// `nu(p^k) p^(-k(n-1))`, the truncation at level `k`.
pub fn sigma_truncation(q: &QuadraticForm, p: u64, k: u32, cfg: &DensityConfig) -> Result<BigRational> {
    let n = q.n_vars() as u32;
    Ok(rat(nu_with(q, p, k, cfg)?, pow_big(p, k * (n - 1))))
}

/// `sigma_p`: exact for odd `p` at which `q` is nonsingular and `n >= 3`,
/// otherwise the truncation at `k_max`.
pub fn sigma_p(q: &QuadraticForm, p: u64, k_max: u32) -> Result<DensityValue> {
    sigma_p_with(q, p, k_max, &DensityConfig::default())
}

pub fn sigma_p_with(q: &QuadraticForm, p: u64, k_max: u32, cfg: &DensityConfig) -> Result<DensityValue> {
    let n = q.n_vars() as u32;
    if is_nonsingular_mod_p(q, p) {
        let nu1 = BigInt::from(zeros_mod_p(q, p, cfg)?);
        if n >= 3 {
            // geometric series: (nu(p) - 1) p^(1-n) / (1 - p^(2-n))
            let value = rat(nu1 - 1, pow_big(p, n - 1) - p);
            return Ok(DensityValue { p, k_used: 1, value, stabilized: true, method: DensityMethod::ClosedForm });
        }
        let value = rat(nu_recursion(&nu1, p, n, k_max), pow_big(p, k_max * (n - 1)));
        return Ok(DensityValue {
            p,
            k_used: k_max,
            value,
            stabilized: false,
            method: DensityMethod::SmoothSingularRecursion,
        });
    }
    Ok(DensityValue {
        p,
        k_used: k_max,
        value: sigma_truncation(q, p, k_max, cfg)?,
        stabilized: false,
        method: DensityMethod::BruteForce,
    })
}

/// Gradient of `q` at `a` is nonzero modulo `p`.
pub fn is_smooth_mod_p(q: &QuadraticForm, a: &[i64], p: u64) -> bool {
    q.gradient(a).iter().any(|&g| g.rem_euclid(p as i128) != 0)
}

/// `nu(p^k; p, a) = #{x mod p^k : x ≡ a mod p, Q(x) ≡ 0 mod p^k}`.
pub fn nu_constrained(q: &QuadraticForm, p: u64, k: u32, a: &[i64]) -> Result<BigInt> {
    nu_constrained_with(q, p, k, a, &DensityConfig::default())
}

pub fn nu_constrained_with(q: &QuadraticForm, p: u64, k: u32, a: &[i64], cfg: &DensityConfig) -> Result<BigInt> {
    let n = q.n_vars() as u32;
    if a.len() != q.n_vars() || k == 0 {
        return Err(Error::InvalidArgument("need one residue per variable and k >= 1".into()));
    }
    let a: Vec<i64> = a.iter().map(|v| v.rem_euclid(p as i64)).collect();
    if q.eval(&a).rem_euclid(p as i128) != 0 {
        return Ok(BigInt::zero());
    }
    if k == 1 {
        return Ok(BigInt::one());
    }
    if a.iter().all(|&v| v == 0) {
        // x = p y with y mod p^(k-1) and Q(y) ≡ 0 mod p^(k-2)
        return Ok(pow_big(p, n) * nu_with(q, p, k - 2, cfg)?);
    }
    if is_smooth_mod_p(q, &a, p) {
        return Ok(pow_big(p, (k - 1) * (n - 1)));
    }
    nu_class_brute(q, p, k, &a, cfg)
}

/// Exhaustive count over the class `a + p y`, `y mod p^(k-1)`.
pub fn nu_class_brute(q: &QuadraticForm, p: u64, k: u32, a: &[i64], cfg: &DensityConfig) -> Result<BigInt> {
    let n = q.n_vars();
    let inner = pow_u128(p as u128, k - 1).ok_or(Error::CapExceeded { needed: u128::MAX, cap: cfg.cap })?;
    check_cap(pow_u128(inner, n as u32).unwrap_or(u128::MAX), cfg.cap)?;
    let m = (inner * p as u128) as i128;
    let terms: Vec<(usize, usize, i128)> = q.coeffs().map(|((i, j), c)| (i, j, (c as i128).rem_euclid(m))).collect();
    let axes = vec![Axis::new(0, inner as i64 - 1); n];
    let count = fold_grid(
        cfg.mode,
        &axes,
        || (0u128, vec![0i128; n]),
        |(c, mut x), y| {
            for i in 0..n {
                x[i] = (a[i] as i128 + p as i128 * y[i] as i128) % m;
            }
            let val = terms.iter().fold(0i128, |acc, &(i, j, cf)| (acc + cf * (x[i] * x[j] % m)) % m);
            (c + (val == 0) as u128, x)
        },
        |(a, x), (b, _)| (a + b, x),
    );
    Ok(BigInt::from(count.0))
}

/// A polynomial reduced modulo `p` for fast evaluation at residues.
struct PolyModP {
    p: u64,
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl PolyModP {
    fn new(f: &IntegerPolynomial, p: u64) -> Self {
        let pb = BigInt::from(p);
        let terms = f
            .terms()
            .filter_map(|(e, c)| {
                let c = c.mod_floor(&pb).to_u64().unwrap();
                (c != 0).then(|| (c, e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect()))
            })
            .collect();
        PolyModP { p, terms }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p as u128;
        let mut acc = 0u128;
        for (c, powers) in &self.terms {
            let mut t = *c as u128;
            for &(i, k) in powers {
                for _ in 0..k {
                    t = t * x[i] as u128 % p;
                }
            }
            acc += t;
        }
        (acc % p) as u64
    }
}

fn check_pair(q: &QuadraticForm, f: &IntegerPolynomial, g: &IntegerPolynomial) -> Result<()> {
    if f.n_vars() != q.n_vars() || g.n_vars() != q.n_vars() {
        return Err(Error::InvalidArgument("f and g must have as many variables as the form".into()));
    }
    Ok(())
}

/// Nonzero zeros `a` of `q` mod `p` with `f(a) ≡ g(a) ≡ 0`, split into
/// smooth and singular ones; the singular ones are returned explicitly.
fn excluded_classes(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p: u64,
    cfg: &DensityConfig,
) -> Result<(u64, Vec<Vec<i64>>)> {
    let fp = PolyModP::new(f, p);
    let gp = PolyModP::new(g, p);
    let a_mat = q.doubled_matrix();
    let pi = p as i128;
    fold_zeros_mod_p(
        q,
        p,
        cfg,
        || (0u64, Vec::new()),
        |(mut smooth, mut singular), x| {
            if x.iter().all(|&v| v == 0) || fp.eval(x) != 0 || gp.eval(x) != 0 {
                return (smooth, singular);
            }
            let is_smooth = a_mat
                .iter()
                .any(|row| row.iter().zip(x).map(|(&r, &v)| r as i128 * v as i128).sum::<i128>().rem_euclid(pi) != 0);
            if is_smooth {
                smooth += 1;
            } else {
                singular.push(x.iter().map(|&v| v as i64).collect());
            }
            (smooth, singular)
        },
        |mut a, mut b| {
            a.1.append(&mut b.1);
            (a.0 + b.0, a.1)
        },
    )
}

/// `g(p)`: the limiting proportion of zeros of `q` with `p | f` and `p | g`.
pub fn g_local(q: &QuadraticForm, f: &IntegerPolynomial, g: &IntegerPolynomial, p: u64, k_max: u32) -> Result<DensityValue> {
    g_local_with(q, f, g, p, k_max, &DensityConfig::default())
}

pub fn g_local_with(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p: u64,
    k_max: u32,
    cfg: &DensityConfig,
) -> Result<DensityValue> {
    check_pair(q, f, g)?;
    let n = q.n_vars() as u32;
    let fp = PolyModP::new(f, p);
    let gp = PolyModP::new(g, p);
    let zero = vec![0u64; n as usize];
    let origin_excluded = fp.eval(&zero) == 0 && gp.eval(&zero) == 0;
    let fully_excluded = fp.is_zero() && gp.is_zero();
    if fully_excluded {
        return Ok(DensityValue { p, k_used: 0, value: BigRational::one(), stabilized: true, method: DensityMethod::ClosedForm });
    }
    let (smooth, singular) = excluded_classes(q, f, g, p, cfg)?;
    if is_nonsingular_mod_p(q, p) && n >= 3 {
        debug_assert!(singular.is_empty());
        // smooth classes contribute p^(1-n) / sigma_p each, the origin p^(2-n)
        let sigma = sigma_p_with(q, p, 1, cfg)?.value;
        let mut value = BigRational::from_integer(BigInt::from(smooth)) / (BigRational::from_integer(pow_big(p, n - 1)) * &sigma);
        if origin_excluded {
            value += rat(BigInt::one(), pow_big(p, n - 2));
        }
        return Ok(DensityValue { p, k_used: 1, value, stabilized: true, method: DensityMethod::ClosedForm });
    }
    // truncation at k_max: class counts over nu(p^k_max)
    let k = k_max.max(1);
    let total = nu_with(q, p, k, cfg)?;
    let mut excluded = BigInt::from(smooth) * pow_big(p, (k - 1) * (n - 1));
    if origin_excluded {
        excluded += nu_constrained_with(q, p, k, &vec![0; n as usize], cfg)?;
    }
    for a in &singular {
        excluded += nu_class_brute(q, p, k, a, cfg)?;
    }
    Ok(DensityValue { p, k_used: k, value: rat(excluded, total), stabilized: false, method: DensityMethod::BruteForce })
}

/// `mu_{Q,p}`: proportion of `p`-adic zeros of `q` with `p ∤ gcd(f, g)`.
pub fn mu_coprime(q: &QuadraticForm, f: &IntegerPolynomial, g: &IntegerPolynomial, p: u64, k_max: u32) -> Result<DensityValue> {
    mu_coprime_with(q, f, g, p, k_max, &DensityConfig::default())
}

pub fn mu_coprime_with(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p: u64,
    k_max: u32,
    cfg: &DensityConfig,
) -> Result<DensityValue> {
    let gv = g_local_with(q, f, g, p, k_max, cfg)?;
    Ok(DensityValue { value: BigRational::one() - gv.value, ..gv })
}

/// `mu` at level `k` straight from the definition: counts every zero modulo
/// `p^k` and tests `p | f`, `p | g` directly. Used as an oracle.
pub fn mu_coprime_exhaustive(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p: u64,
    k: u32,
    cfg: &DensityConfig,
) -> Result<BigRational> {
    check_pair(q, f, g)?;
    let n = q.n_vars();
    let m = pow_u128(p as u128, k).ok_or(Error::CapExceeded { needed: u128::MAX, cap: cfg.cap })?;
    check_cap(pow_u128(m, n as u32).unwrap_or(u128::MAX), cfg.cap)?;
    let mi = m as i128;
    let fp = PolyModP::new(f, p);
    let gp = PolyModP::new(g, p);
    let axes = vec![Axis::new(0, m as i64 - 1); n];
    let (zeros, good) = fold_grid(
        cfg.mode,
        &axes,
        || (0u64, 0u64),
        |(z, c), x| {
            if q.eval(x).rem_euclid(mi) != 0 {
                return (z, c);
            }
            let r: Vec<u64> = x.iter().map(|&v| (v as u64) % p).collect();
            let coprime = fp.eval(&r) != 0 || gp.eval(&r) != 0;
            (z + 1, c + coprime as u64)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(rat(BigInt::from(good), BigInt::from(zeros)))
}

/// Limiting weight `sigma_p(a) / sigma_p` of the class `a mod p` for an odd
/// `p` at which `q` is nonsingular (`n >= 3`).
pub fn class_weight(q: &QuadraticForm, p: u64, a: &[i64], cfg: &DensityConfig) -> Result<BigRational> {
    let n = q.n_vars() as u32;
    if !is_nonsingular_mod_p(q, p) || n < 3 {
        return Err(Error::NotGoodModulus(p));
    }
    let a: Vec<i64> = a.iter().map(|v| v.rem_euclid(p as i64)).collect();
    if q.eval(&a).rem_euclid(p as i128) != 0 {
        return Ok(BigRational::zero());
    }
    if a.iter().all(|&v| v == 0) {
        return Ok(rat(BigInt::one(), pow_big(p, n - 2)));
    }
    let sigma = sigma_p_with(q, p, 1, cfg)?.value;
    Ok(BigRational::one() / (BigRational::from_integer(pow_big(p, n - 1)) * sigma))
}

/// `g(q)` for squarefree `q` composed of primes at which the form is
/// nonsingular, summed directly over residues modulo `q`.
pub fn g_weight(q: &QuadraticForm, f: &IntegerPolynomial, g: &IntegerPolynomial, modulus: u64, cfg: &DensityConfig) -> Result<BigRational> {
    check_pair(q, f, g)?;
    let n = q.n_vars();
    let primes: Vec<u64> = arith::factor_u64(modulus).into_iter().map(|(p, e)| {
        if e > 1 { Err(Error::InvalidArgument(format!("{modulus} is not squarefree"))) } else { Ok(p) }
    }).collect::<Result<_>>()?;
    for &p in &primes {
        if !is_nonsingular_mod_p(q, p) {
            return Err(Error::NotGoodModulus(p));
        }
    }
    check_cap(pow_u128(modulus as u128, n as u32).unwrap_or(u128::MAX), cfg.cap)?;
    // per-prime weights of each residue class, indexed by the class vector
    let mut weights: Vec<std::collections::HashMap<Vec<i64>, BigRational>> = Vec::new();
    for &p in &primes {
        let mut w = std::collections::HashMap::new();
        let axes = vec![Axis::new(0, p as i64 - 1); n];
        let classes = fold_grid(
            ExecMode::Sequential,
            &axes,
            Vec::new,
            |mut v: Vec<Vec<i64>>, a| {
                v.push(a.to_vec());
                v
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        for a in classes {
            let wt = class_weight(q, p, &a, cfg)?;
            if !wt.is_zero() {
                w.insert(a, wt);
            }
        }
        weights.push(w);
    }
    let mi = modulus as i64;
    let axes = vec![Axis::new(0, mi - 1); n];
    let total = fold_grid(
        cfg.mode,
        &axes,
        BigRational::zero,
        |acc, a| {
            if q.eval(a).rem_euclid(modulus as i128) != 0 {
                return acc;
            }
            let big: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
            let mb = BigInt::from(modulus);
            if !(f.eval(&big).mod_floor(&mb)).is_zero() || !(g.eval(&big).mod_floor(&mb)).is_zero() {
                return acc;
            }
            let mut term = BigRational::one();
            for (&p, w) in primes.iter().zip(&weights) {
                let r: Vec<i64> = a.iter().map(|v| v % p as i64).collect();
                match w.get(&r) {
                    Some(x) => term *= x,
                    None => return acc,
                }
            }
            acc + term
        },
        |a, b| a + b,
    );
    Ok(total)
}

/// Truncated Euler product for the density of zeros with `gcd(f, g) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoprimePrediction {
    pub product: BigRational,
    /// Upper bound for `product - (full product)`, from `g(p) <= C p^-2`.
    pub tail_bound: BigRational,
    /// Fitted `C = max g(p) p^2` over the primes used with a certified limit.
    pub c_fit: BigRational,
    pub factors: Vec<DensityValue>,
}

/// `sum_{p > x} p^-2`, rounded up.
pub fn prime_reciprocal_square_tail(x: u64) -> f64 {
    const LIMIT: u64 = 100_000;
    if x >= LIMIT {
        return 1.0 / x as f64;
    }
    let s: f64 = arith::primes_up_to(LIMIT)
        .into_iter()
        .filter(|&p| p > x)
        .map(|p| 1.0 / (p as f64 * p as f64))
        .sum();
    // sum over all integers above LIMIT is below 1 / LIMIT
    s + 1.0 / LIMIT as f64
}

fn f64_ceil_rational(x: f64) -> BigRational {
    let den = BigInt::from(1_000_000_000_000u64);
    let num = BigInt::from((x * 1e12).ceil() as i128 + 1);
    rat(num, den)
}

pub fn predicted_coprime_density(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p_max: u64,
    k_max: u32,
) -> Result<CoprimePrediction> {
    predicted_coprime_density_with(q, f, g, p_max, k_max, &DensityConfig::default())
}

pub fn predicted_coprime_density_with(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    p_max: u64,
    k_max: u32,
    cfg: &DensityConfig,
) -> Result<CoprimePrediction> {
    check_pair(q, f, g)?;
    let mut product = BigRational::one();
    let mut c_fit = BigRational::zero();
    let mut certified = 0;
    let mut factors = Vec::new();
    for p in arith::primes_up_to(p_max) {
        let mu = mu_coprime_with(q, f, g, p, k_max, cfg)?;
        if mu.stabilized {
            certified += 1;
            let gp = (BigRational::one() - &mu.value) * BigRational::from_integer(BigInt::from(p * p));
            if gp > c_fit {
                c_fit = gp;
            }
        }
        product *= &mu.value;
        factors.push(mu);
    }
    let tail_bound = if certified == 0 {
        if product.is_zero() { BigRational::zero() } else { BigRational::one() }
    } else if c_fit.is_zero() {
        BigRational::zero()
    } else {
        &c_fit * f64_ceil_rational(prime_reciprocal_square_tail(p_max))
    };
    Ok(CoprimePrediction { product, tail_bound, c_fit, factors })
}
