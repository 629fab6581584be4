//! Sparse multivariate polynomials over the integers: heights, Sylvester
//! resultants, zero counts in boxes and modulo primes, and the elimination of
//! `x0` on the quadric `x0*x1 = Q0(x2, ..., xn)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{check_cap, Error, Result};
use crate::exec::{fold_grid, Axis, ExecMode};
use crate::parse::{parse_raw, RawPoly};
use crate::quadform::QuadraticForm;

/// Default cap on exhaustive evaluations for the zero counters.
pub const DEFAULT_ZERO_COUNT_CAP: u128 = 100_000_000;

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    n_vars: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

impl IntegerPolynomial {
    pub fn zero(n_vars: usize) -> Self {
        IntegerPolynomial { n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(n_vars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(vec![0; n_vars], c.into());
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        assert!(i < n_vars, "variable x{i} outside {n_vars} variables");
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn monomial(exps: Exponents, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c.into());
        p
    }

    /// Builds from (exponents, coefficient) pairs; repeated exponents add up.
    pub fn from_terms<C: Into<BigInt>>(n_vars: usize, terms: impl IntoIterator<Item = (Exponents, C)>) -> Self {
        let mut p = Self::zero(n_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), n_vars);
            p.add_term(e, c.into());
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Parses the text grammar with variables indexed absolutely from `x0`;
    /// the polynomial has `max index + 1` variables (one for a constant).
    pub fn parse(text: &str) -> Result<Self> {
        let raw = parse_raw(text)?;
        let n = raw.var_span().map_or(1, |(_, hi)| hi + 1);
        Ok(Self::from_raw(&raw, 0, n))
    }

    /// Parses with `x{offset}` mapped to the first of `n_vars` variables.
    pub fn parse_in(text: &str, offset: usize, n_vars: usize) -> Result<Self> {
        let raw = parse_raw(text)?;
        if let Some((lo, hi)) = raw.var_span() {
            if lo < offset || hi >= offset + n_vars {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("variables x{lo}..x{hi} outside x{offset}..x{}", offset + n_vars - 1),
                });
            }
        }
        Ok(Self::from_raw(&raw, offset, n_vars))
    }

    pub(crate) fn from_raw(raw: &RawPoly, offset: usize, n_vars: usize) -> Self {
        let mut p = Self::zero(n_vars);
        for (e, c) in &raw.terms {
            p.add_term(e[offset..offset + n_vars].to_vec(), c.clone());
        }
        p
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Maximum modulus of the coefficients.
    pub fn height(&self) -> Result<BigInt> {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Same polynomial viewed in `n_vars` variables, its own variables placed
    /// starting at `offset`.
    pub fn embed(&self, offset: usize, n_vars: usize) -> Self {
        assert!(offset + self.n_vars <= n_vars);
        let mut p = Self::zero(n_vars);
        for (e, c) in &self.terms {
            let mut big = vec![0; n_vars];
            big[offset..offset + self.n_vars].copy_from_slice(e);
            p.add_term(big, c.clone());
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.n_vars, 1);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero(self.n_vars);
        for (e, k) in &self.terms {
            p.add_term(e.clone(), k * c);
        }
        p
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_exact(&self, c: &BigInt) -> Self {
        let mut p = Self::zero(self.n_vars);
        for (e, k) in &self.terms {
            debug_assert!((k % c).is_zero());
            p.add_term(e.clone(), k / c);
        }
        p
    }

    pub fn eval(&self, x: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.n_vars);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(xi.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_i64(&self, x: &[i64]) -> BigInt {
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.eval(&big)
    }

    /// Value modulo `m` at a residue vector.
    pub fn eval_mod(&self, x: &[u64], m: u64) -> u64 {
        let mm = m as u128;
        let mut acc = 0u128;
        for (e, c) in &self.terms {
            let cm = c.mod_floor(&BigInt::from(m)).to_u64().unwrap() as u128;
            let mut t = cm;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * (*xi as u128 % mm) % mm;
                }
            }
            acc = (acc + t) % mm;
        }
        acc as u64
    }

    /// Whether every coefficient is divisible by `p`.
    pub fn vanishes_mod(&self, p: u64) -> bool {
        let pb = BigInt::from(p);
        self.terms.values().all(|c| (c % &pb).is_zero())
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of
    /// `x_var^k`, a polynomial in the same variables with `x_var` absent.
    pub fn coefficients_in(&self, var: usize) -> Vec<IntegerPolynomial> {
        let d = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.n_vars); d + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[k].add_term(e2, c.clone());
        }
        out
    }

    /// Substitutes integers for some variables, leaving the rest symbolic.
    pub fn partial_eval(&self, values: &[Option<i64>]) -> Self {
        assert_eq!(values.len(), self.n_vars);
        let mut p = Self::zero(self.n_vars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut e2 = e.clone();
            for (i, v) in values.iter().enumerate() {
                if let Some(v) = v {
                    coeff *= num_traits::pow(BigInt::from(*v), e[i] as usize);
                    e2[i] = 0;
                }
            }
            p.add_term(e2, coeff);
        }
        p
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    /// Canonical sorted term list: descending total degree, then descending
    /// exponent vectors.
    pub fn sorted_terms(&self) -> Vec<(Exponents, BigInt)> {
        let mut v: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }

    /// Renders with variable names starting at `x{offset}`.
    pub fn to_text(&self, offset: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&k| k == 0);
            if !abs.is_one() || is_const {
                factors.push(abs.to_string());
            }
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(format!("x{}", v + offset)),
                    _ => factors.push(format!("x{}^{}", v + offset, k)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(0))
    }
}

impl fmt::Debug for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegerPolynomial[{}]({})", self.n_vars, self)
    }
}

impl Add for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn add(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Sub for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn sub(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c);
        }
        p
    }
}

impl Neg for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn neg(self) -> IntegerPolynomial {
        self.scale(&BigInt::from(-1))
    }
}

impl Mul for &IntegerPolynomial {
    type Output = IntegerPolynomial;
    fn mul(self, rhs: &IntegerPolynomial) -> IntegerPolynomial {
        assert_eq!(self.n_vars, rhs.n_vars);
        let mut p = IntegerPolynomial::zero(self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntegerPolynomial {
            type Output = IntegerPolynomial;
            fn $m(self, rhs: IntegerPolynomial) -> IntegerPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Fixed-width evaluator for the hot loops. Evaluation is checked and
/// returns `None` on `i128` overflow, in which case callers fall back to
/// [`IntegerPolynomial::eval_i64`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(i128, Vec<(usize, u32)>)>,
    exact: bool,
}

impl CompiledPoly {
    fn new(p: &IntegerPolynomial) -> Self {
        let mut exact = true;
        let terms = p
            .terms
            .iter()
            .map(|(e, c)| {
                let c = c.to_i128().unwrap_or_else(|| {
                    exact = false;
                    0
                });
                let powers = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect();
                (c, powers)
            })
            .collect();
        CompiledPoly { terms, exact }
    }

    pub fn eval(&self, x: &[i64]) -> Option<i128> {
        if !self.exact {
            return None;
        }
        let mut acc: i128 = 0;
        for (c, powers) in &self.terms {
            let mut t = *c;
            for &(i, k) in powers {
                let xi = x[i] as i128;
                for _ in 0..k {
                    t = t.checked_mul(xi)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    pub fn is_constant_zero(&self) -> bool {
        self.exact && self.terms.is_empty()
    }
}

/// Determinant of a square matrix of polynomials, expanding row by row with
/// memoisation over the set of columns already used. Division free.
fn poly_determinant(matrix: &[Vec<IntegerPolynomial>], n_vars: usize) -> IntegerPolynomial {
    let size = matrix.len();
    if size == 0 {
        return IntegerPolynomial::constant(n_vars, 1);
    }
    assert!(size <= 30, "matrix too large for subset expansion");
    let mut layer: HashMap<u32, IntegerPolynomial> = HashMap::new();
    layer.insert(0, IntegerPolynomial::constant(n_vars, 1));
    for row in matrix {
        let mut next: HashMap<u32, IntegerPolynomial> = HashMap::new();
        for (mask, val) in &layer {
            for (col, entry) in row.iter().enumerate() {
                if entry.is_zero() || mask & (1 << col) != 0 {
                    continue;
                }
                let inversions = (mask >> (col + 1)).count_ones();
                let mut term = val * entry;
                if inversions % 2 == 1 {
                    term = -&term;
                }
                let slot = next.entry(mask | (1 << col)).or_insert_with(|| IntegerPolynomial::zero(n_vars));
                *slot = &*slot + &term;
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
    }
    layer
        .remove(&((1u32 << size) - 1))
        .unwrap_or_else(|| IntegerPolynomial::zero(n_vars))
}

/// The Sylvester matrix of `f` and `g` in `var`: `deg g` rows of shifted
/// `f`-coefficients above `deg f` rows of shifted `g`-coefficients, each row
/// listing coefficients by descending power.
pub fn sylvester_matrix(f: &IntegerPolynomial, g: &IntegerPolynomial, var: usize) -> Result<Vec<Vec<IntegerPolynomial>>> {
    assert_eq!(f.n_vars, g.n_vars);
    let d1 = f.degree_in(var).unwrap_or(0) as usize;
    let d2 = g.degree_in(var).unwrap_or(0) as usize;
    if d1 == 0 || d2 == 0 {
        return Err(Error::VariableAbsent(var));
    }
    let fc = f.coefficients_in(var);
    let gc = g.coefficients_in(var);
    let size = d1 + d2;
    let zero = IntegerPolynomial::zero(f.n_vars);
    let mut m = vec![vec![zero; size]; size];
    for i in 0..d2 {
        for j in 0..=d1 {
            m[i][i + j] = fc[d1 - j].clone();
        }
    }
    for i in 0..d1 {
        for j in 0..=d2 {
            m[d2 + i][i + j] = gc[d2 - j].clone();
        }
    }
    Ok(m)
}

/// Resultant of `f` and `g` with respect to `var`, as a polynomial in the
/// same variable set with `var` absent.
pub fn sylvester_resultant(f: &IntegerPolynomial, g: &IntegerPolynomial, var: usize) -> Result<IntegerPolynomial> {
    let m = sylvester_matrix(f, g, var)?;
    Ok(poly_determinant(&m, f.n_vars))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCount {
    pub exact: u128,
    pub bound: u128,
}

fn pow_u128(b: u128, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(b))
}

/// Zeros of `f` in the cube `[-B, B]^n` together with the bound `n d (2B+1)^(n-1)`.
pub fn count_zeros_box(f: &IntegerPolynomial, bound: u64, cap: u128) -> Result<ZeroCount> {
    count_zeros_box_with(f, bound, cap, ExecMode::default())
}

pub fn count_zeros_box_with(f: &IntegerPolynomial, bound: u64, cap: u128, mode: ExecMode) -> Result<ZeroCount> {
    let d = f.degree().ok_or(Error::ZeroPolynomial)? as u128;
    let n = f.n_vars;
    let side = 2 * bound as u128 + 1;
    check_cap(pow_u128(side, n), cap)?;
    let b = bound as i64;
    let axes = vec![Axis::new(-b, b); n];
    let compiled = f.compile();
    let exact = fold_grid(
        mode,
        &axes,
        || 0u128,
        |acc, x| {
            let zero = match compiled.eval(x) {
                Some(v) => v == 0,
                None => f.eval_i64(x).is_zero(),
            };
            acc + zero as u128
        },
        |a, b| a + b,
    );
    Ok(ZeroCount { exact, bound: n as u128 * d * pow_u128(side, n - 1) })
}

/// Points of `(0, p]^n` (equivalently all residues) where `p | f(x)`, with the
/// bound `n d p^(n-1)`.
pub fn count_zeros_mod_p(f: &IntegerPolynomial, p: u64, cap: u128) -> Result<ZeroCount> {
    count_zeros_mod_p_with(f, p, cap, ExecMode::default())
}

pub fn count_zeros_mod_p_with(f: &IntegerPolynomial, p: u64, cap: u128, mode: ExecMode) -> Result<ZeroCount> {
    if f.vanishes_mod(p) {
        return Err(Error::IdenticallyZeroModP(p));
    }
    let d = f.degree().unwrap() as u128;
    let n = f.n_vars;
    check_cap(pow_u128(p as u128, n), cap)?;
    let axes = vec![Axis::new(0, p as i64 - 1); n];
    let exact = fold_grid(
        mode,
        &axes,
        || (0u128, vec![0u64; n]),
        |(acc, mut buf), x| {
            for (b, &v) in buf.iter_mut().zip(x) {
                *b = v as u64;
            }
            let hit = f.eval_mod(&buf, p) == 0;
            (acc + hit as u128, buf)
        },
        |a, b| (a.0 + b.0, a.1),
    )
    .0;
    Ok(ZeroCount { exact, bound: n as u128 * d * pow_u128(p as u128, n - 1) })
}

/// For forms in `x0..xn` and `Q = x0 x1 - Q0(x2..xn)`, returns the `K_i` in
/// the same `n + 1` variables (free of `x0`) with `x1^D F_i = K_i` at every
/// integer zero of `Q`. `degree_d` defaults to the largest degree of the `F_i`.
pub fn eliminate_x0(q0: &QuadraticForm, forms: &[IntegerPolynomial], degree_d: Option<u32>) -> Result<Vec<IntegerPolynomial>> {
    let n_vars = q0.n_vars() + 2;
    let q0p = q0.to_polynomial().embed(2, n_vars);
    let max_deg = forms.iter().filter_map(|f| f.degree()).max().unwrap_or(0);
    let d = degree_d.unwrap_or(max_deg);
    if d < max_deg {
        return Err(Error::InvalidArgument(format!("D = {d} is below the largest degree {max_deg}")));
    }
    let x1 = IntegerPolynomial::var(n_vars, 1);
    let mut q0_pows = vec![IntegerPolynomial::constant(n_vars, 1)];
    let mut x1_pows = vec![IntegerPolynomial::constant(n_vars, 1)];
    for k in 1..=d {
        q0_pows.push(&q0_pows[k as usize - 1] * &q0p);
        x1_pows.push(&x1_pows[k as usize - 1] * &x1);
    }
    forms
        .iter()
        .map(|f| {
            if f.n_vars != n_vars {
                return Err(Error::InvalidArgument(format!(
                    "form has {} variables, expected {n_vars}",
                    f.n_vars
                )));
            }
            if !f.is_homogeneous() {
                return Err(Error::NotHomogeneous);
            }
            // Rewrite x0^a x1^b m as x0^(a-k) x1^(b-k) Q0^k m with k = min(a, b);
            // one pass reaches the fixpoint since Q0 involves neither x0 nor x1.
            let mut parts: BTreeMap<u32, IntegerPolynomial> = BTreeMap::new();
            for (e, c) in &f.terms {
                let k = e[0].min(e[1]);
                let mut e2 = e.clone();
                e2[0] -= k;
                e2[1] -= k;
                let j = e2[0];
                e2[0] = 0;
                let piece = &IntegerPolynomial::monomial(e2, c.clone()) * &q0_pows[k as usize];
                let slot = parts.entry(j).or_insert_with(|| IntegerPolynomial::zero(n_vars));
                *slot = &*slot + &piece;
            }
            // parts[0] = G, parts[j] = H_j (after the rewrite H_j has no x1
            // factor paired with x0, but may contain x1 only when j = 0).
            let mut k_poly = IntegerPolynomial::zero(n_vars);
            for (j, part) in parts {
                let j = j as usize;
                let term = &(&q0_pows[j] * &x1_pows[d as usize - j]) * &part;
                k_poly = &k_poly + &term;
            }
            Ok(k_poly)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StripMode {
    /// Remove restricted content and any common monomial factor.
    #[default]
    ContentAndMonomial,
    ContentOnly,
}

/// Divides each polynomial by the part of its content supported on
/// `allowed_primes`, then removes the largest monomial dividing every
/// nonzero polynomial.
pub fn strip_common_content(forms: &[IntegerPolynomial], allowed_primes: &BTreeSet<u64>) -> Result<Vec<IntegerPolynomial>> {
    strip_common_content_with(forms, allowed_primes, StripMode::ContentAndMonomial)
}

pub fn strip_common_content_with(
    forms: &[IntegerPolynomial],
    allowed_primes: &BTreeSet<u64>,
    mode: StripMode,
) -> Result<Vec<IntegerPolynomial>> {
    if forms.is_empty() || forms.iter().all(|f| f.is_zero()) {
        return Err(Error::AllZero);
    }
    let mut out: Vec<IntegerPolynomial> = forms
        .iter()
        .map(|f| {
            if f.is_zero() {
                return f.clone();
            }
            let mut content = f.content();
            let mut divisor = BigInt::one();
            for &p in allowed_primes {
                let pb = BigInt::from(p);
                while (&content % &pb).is_zero() {
                    content /= &pb;
                    divisor *= &pb;
                }
            }
            f.div_exact(&divisor)
        })
        .collect();
    if mode == StripMode::ContentAndMonomial {
        let n = out[0].n_vars;
        let mut common: Option<Vec<u32>> = None;
        for f in out.iter().filter(|f| !f.is_zero()) {
            for e in f.terms.keys() {
                common = Some(match common {
                    None => e.clone(),
                    Some(c) => c.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
                });
            }
        }
        let common = common.unwrap_or_else(|| vec![0; n]);
        if common.iter().any(|&k| k > 0) {
            for f in out.iter_mut() {
                let mut g = IntegerPolynomial::zero(n);
                for (e, c) in &f.terms {
                    let e2 = e.iter().zip(&common).map(|(a, b)| a - b).collect();
                    g.add_term(e2, c.clone());
                }
                *f = g;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> IntegerPolynomial {
        IntegerPolynomial::parse_in(s, 0, n).unwrap()
    }

    #[test]
    fn height_examples() {
        assert_eq!(p("3*x1^2 - 7*x2", 3).height().unwrap(), BigInt::from(7));
        assert_eq!(p("x1", 2).height().unwrap(), BigInt::from(1));
        assert_eq!(p("-12", 1).height().unwrap(), BigInt::from(12));
        assert_eq!(IntegerPolynomial::zero(2).height(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn resultant_examples() {
        let r = sylvester_resultant(&p("x1^2 - x2", 3), &p("x1 - x2", 3), 1).unwrap();
        assert_eq!(r, p("x2^2 - x2", 3));
        let r = sylvester_resultant(&p("x1 - x2", 3), &p("x1 - x2", 3), 1).unwrap();
        assert!(r.is_zero());
        let r = sylvester_resultant(&p("x1 - x2", 4), &p("x1 - x3", 4), 1).unwrap();
        assert_eq!(r, p("x2 - x3", 4));
        assert_eq!(sylvester_resultant(&p("x2", 3), &p("x1", 3), 1), Err(Error::VariableAbsent(1)));
    }

    #[test]
    fn resultant_of_linear_and_quadratic_by_hand() {
        // Res_x(a x^2 + b x + c, x - r) = a r^2 + b r + c up to the row sign.
        let f = p("2*x0^2 + 3*x0 - 5", 1);
        let g = p("x0 - 4", 1);
        let r = sylvester_resultant(&f, &g, 0).unwrap();
        assert_eq!(r, IntegerPolynomial::constant(1, 2 * 16 + 12 - 5));
    }

    #[test]
    fn zero_count_box_examples() {
        let c = count_zeros_box(&p("x1", 2), 5, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (11, 22));
        let c = count_zeros_box(&p("x0^2 + x1^2", 2), 2, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (1, 20));
        let c = count_zeros_box(&p("x0*x1", 2), 1, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (5, 12));
        assert!(matches!(count_zeros_box(&p("x0", 5), 100, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn zero_count_mod_p_examples() {
        let c = count_zeros_mod_p(&p("x0", 2), 3, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (3, 6));
        let c = count_zeros_mod_p(&p("x0^2 + x1^2", 2), 3, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (1, 12));
        let c = count_zeros_mod_p(&p("x0*x1 - 1", 2), 5, DEFAULT_ZERO_COUNT_CAP).unwrap();
        assert_eq!((c.exact, c.bound), (4, 20));
        assert_eq!(
            count_zeros_mod_p(&p("6*x0 + 3", 1), 3, DEFAULT_ZERO_COUNT_CAP),
            Err(Error::IdenticallyZeroModP(3))
        );
    }

    #[test]
    fn eliminate_examples() {
        let q0 = QuadraticForm::parse("x0^2 + x1^2").unwrap(); // Q0(x2, x3)
        let k = eliminate_x0(&q0, &[p("x0", 4)], Some(1)).unwrap();
        assert_eq!(k[0], p("x2^2 + x3^2", 4));
        let k = eliminate_x0(&q0, &[p("x2", 4)], Some(1)).unwrap();
        assert_eq!(k[0], p("x1*x2", 4));
        let k = eliminate_x0(&q0, &[p("x0^2", 4)], None).unwrap();
        assert_eq!(k[0], p("(x2^2 + x3^2)^2", 4));
        assert_eq!(eliminate_x0(&q0, &[p("x0^2 + x1", 4)], None), Err(Error::NotHomogeneous));
    }

    #[test]
    fn eliminate_removes_x0x1_monomials() {
        let q0 = QuadraticForm::parse("x0^2 - 3*x1^2").unwrap();
        let k = eliminate_x0(&q0, &[p("x0^2*x1 + 2*x0*x1*x2 - x3^3", 4)], None).unwrap();
        assert_eq!(k[0].degree_in(0), Some(0));
    }

    #[test]
    fn strip_examples() {
        let two: BTreeSet<u64> = [2].into_iter().collect();
        let none = BTreeSet::new();
        let f = [p("6*x1", 2), p("10*x1^2", 2)];
        assert_eq!(strip_common_content_with(&f, &two, StripMode::ContentOnly).unwrap(), vec![p("3*x1", 2), p("5*x1^2", 2)]);
        assert_eq!(strip_common_content(&f, &two).unwrap(), vec![p("3", 2), p("5*x1", 2)]);
        let g = [p("x1*x2", 4), p("x1*x3", 4)];
        assert_eq!(strip_common_content(&g, &none).unwrap(), vec![p("x2", 4), p("x3", 4)]);
        assert_eq!(strip_common_content(&[p("7", 1)], &none).unwrap(), vec![p("7", 1)]);
        assert_eq!(strip_common_content(&[IntegerPolynomial::zero(2)], &none), Err(Error::AllZero));
    }

    #[test]
    fn display_round_trips() {
        for s in ["x0*x1 - x2^2 - x3^2 + 2*x4^2", "-x3 + 7", "0", "-12", "3*x0^2*x1 - x1^3 + x2"] {
            let a = IntegerPolynomial::parse_in(s, 0, 5).unwrap();
            let b = IntegerPolynomial::parse_in(&a.to_string(), 0, 5).unwrap();
            assert_eq!(a, b, "{s} -> {a}");
        }
    }

    #[test]
    fn compiled_eval_matches_big() {
        let f = p("3*x0^2*x1 - 7*x1^3 + x2 - 11", 3);
        let c = f.compile();
        for x in [[1i64, -2, 3], [100, 200, -300], [0, 0, 0]] {
            assert_eq!(BigInt::from(c.eval(&x).unwrap()), f.eval_i64(&x));
        }
        let huge = p("x0^9", 1).compile();
        assert_eq!(huge.eval(&[1i64 << 20]), None);
    }
}
