//! Integral quadratic forms: rank, signature, reduction modulo primes, prime
//! splitting in quadratic fields and the change of variables to `x0*x1 - Q0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::linalg;
use crate::parse::parse_raw;
use crate::poly::IntegerPolynomial;

/// `Q(x) = sum_{i <= j} c_ij x_i x_j` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    n_vars: usize,
    coeffs: BTreeMap<(usize, usize), i64>,
}

impl QuadraticForm {
    /// Builds from `((i, j), c)` pairs; pairs are unordered and repeats add up.
    pub fn new(n_vars: usize, coeffs: impl IntoIterator<Item = ((usize, usize), i64)>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidArgument("a form needs at least one variable".into()));
        }
        let mut map: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for ((i, j), c) in coeffs {
            let key = (i.min(j), i.max(j));
            if key.1 >= n_vars {
                return Err(Error::InvalidArgument(format!("x{} outside {n_vars} variables", key.1)));
            }
            let e = map.entry(key).or_insert(0);
            *e = e
                .checked_add(c)
                .ok_or_else(|| Error::InvalidArgument("coefficient overflow".into()))?;
        }
        map.retain(|_, c| *c != 0);
        Ok(QuadraticForm { n_vars, coeffs: map })
    }

    /// Diagonal form `sum a_i x_i^2`.
    pub fn diagonal(a: &[i64]) -> Self {
        Self::new(a.len(), a.iter().enumerate().map(|(i, &c)| ((i, i), c))).unwrap()
    }

    /// `x0*x1 - Q0(x2, ..., x_{k+1})` for `Q0` in `k` variables.
    pub fn hyperbolic(q0: &QuadraticForm) -> Self {
        let mut coeffs = vec![((0, 1), 1)];
        coeffs.extend(q0.coeffs.iter().map(|(&(i, j), &c)| ((i + 2, j + 2), -c)));
        Self::new(q0.n_vars + 2, coeffs).unwrap()
    }

    /// Parses the shared grammar. The variables of the form are the span from
    /// the smallest to the largest index that occurs, so `x1^2 + x2^2 - x3^2`
    /// is a ternary form.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::parse_with_offset(text)?.0)
    }

    /// Like [`parse`](Self::parse), also returning the index of the first
    /// variable so companion polynomials can be read in the same coordinates.
    pub fn parse_with_offset(text: &str) -> Result<(Self, usize)> {
        let raw = parse_raw(text)?;
        let (lo, hi) = raw.var_span().ok_or_else(|| Error::Parse { pos: 0, msg: "form has no variables".into() })?;
        Ok((Self::from_polynomial(&IntegerPolynomial::from_raw(&raw, lo, hi - lo + 1))?, lo))
    }

    /// Parses with `x{offset}` as the first of `n_vars` variables.
    pub fn parse_in(text: &str, offset: usize, n_vars: usize) -> Result<Self> {
        Self::from_polynomial(&IntegerPolynomial::parse_in(text, offset, n_vars)?)
    }

    pub fn from_polynomial(p: &IntegerPolynomial) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (e, c) in p.terms() {
            if e.iter().sum::<u32>() != 2 {
                return Err(Error::Parse { pos: 0, msg: "not a quadratic form".into() });
            }
            let vars: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
            let c = c
                .to_i64()
                .ok_or_else(|| Error::InvalidArgument("coefficient exceeds 64 bits".into()))?;
            coeffs.push(((vars[0], vars[1]), c));
        }
        Self::new(p.n_vars(), coeffs)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn coeff(&self, i: usize, j: usize) -> i64 {
        self.coeffs.get(&(i.min(j), i.max(j))).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ((usize, usize), i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[i64]) -> i128 {
        debug_assert_eq!(x.len(), self.n_vars);
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c as i128 * x[i] as i128 * x[j] as i128)
            .sum()
    }

    pub fn eval_big(&self, x: &[BigInt]) -> BigInt {
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| BigInt::from(c) * &x[i] * &x[j])
            .sum()
    }

    /// `A` with `A_ii = 2 c_ii`, `A_ij = c_ij`, so that `Q(x) = x^T A x / 2`.
    pub fn doubled_matrix(&self) -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; self.n_vars]; self.n_vars];
        for (&(i, j), &c) in &self.coeffs {
            if i == j {
                a[i][i] = 2 * c;
            } else {
                a[i][j] = c;
                a[j][i] = c;
            }
        }
        a
    }

    fn doubled_big(&self) -> linalg::IntMatrix {
        linalg::to_big(&self.doubled_matrix())
    }

    /// `b(x, y) = x^T A y = Q(x + y) - Q(x) - Q(y)`.
    pub fn bilinear_big(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let a = self.doubled_big();
        linalg::dot(x, &linalg::mat_vec(&a, y))
    }

    /// The gradient `A x`.
    pub fn gradient(&self, x: &[i64]) -> Vec<i128> {
        let a = self.doubled_matrix();
        a.iter()
            .map(|row| row.iter().zip(x).map(|(&r, &v)| r as i128 * v as i128).sum())
            .collect()
    }

    pub fn determinant(&self) -> BigInt {
        linalg::det(&self.doubled_big())
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.doubled_big())
    }

    /// `(positive, negative)` inertia indices.
    pub fn signature(&self) -> (usize, usize) {
        linalg::signature(&self.doubled_big())
    }

    pub fn is_indefinite(&self) -> bool {
        let (p, n) = self.signature();
        p > 0 && n > 0
    }

    pub fn rank_mod_p(&self, p: u64) -> usize {
        linalg::rank_mod_p(&self.doubled_big(), p)
    }

    /// Odd with the same rank modulo `p` as over Q.
    pub fn is_good_prime(&self, p: u64) -> bool {
        p % 2 == 1 && self.rank_mod_p(p) == self.rank()
    }

    pub fn to_polynomial(&self) -> IntegerPolynomial {
        IntegerPolynomial::from_terms(
            self.n_vars,
            self.coeffs.iter().map(|(&(i, j), &c)| {
                let mut e = vec![0u32; self.n_vars];
                e[i] += 1;
                e[j] += 1;
                (e, c)
            }),
        )
    }

    /// For `Q = x0*x1 - Q0(x2, ..)` returns `Q0` (possibly the zero form).
    pub fn hyperbolic_part(&self) -> Option<QuadraticForm> {
        if self.n_vars < 3 || self.coeff(0, 1) != 1 || self.coeff(0, 0) != 0 || self.coeff(1, 1) != 0 {
            return None;
        }
        let mut q0 = Vec::new();
        for (&(i, j), &c) in &self.coeffs {
            if (i, j) == (0, 1) {
                continue;
            }
            if i < 2 {
                return None;
            }
            q0.push(((i - 2, j - 2), -c));
        }
        QuadraticForm::new(self.n_vars - 2, q0).ok()
    }

    pub fn is_hyperbolic_shape(&self) -> bool {
        self.hyperbolic_part().is_some()
    }

    /// Finds `T`, `N`, `Q0` with `Q*(T x) = N^2 Q(x)` for `Q* = x0*x1 - Q0`.
    /// A smooth integer zero is looked up in `[-search_bound, search_bound]^n`
    /// in order of increasing sup norm.
    pub fn normalize_to_hyperbolic(&self, search_bound: u64) -> Result<HyperbolicNormalization> {
        let n = self.n_vars;
        if let Some(q0) = self.hyperbolic_part() {
            let t = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
            return Ok(HyperbolicNormalization { t, n: 1, q0 });
        }
        if !self.is_indefinite() {
            return Err(Error::NotIndefinite);
        }
        let rank = self.rank();
        if rank < 3 {
            return Err(Error::RankTooSmall { rank, needed: 3 });
        }
        let e = self.smooth_zero(search_bound).ok_or(Error::SearchExhausted(search_bound))?;
        self.complete_hyperbolic(&e)
    }

    /// First integer zero with nonzero gradient, by increasing sup norm.
    pub fn smooth_zero(&self, search_bound: u64) -> Option<Vec<i64>> {
        let n = self.n_vars;
        let b = search_bound as i64;
        for r in 1..=b {
            let mut x = vec![-r; n];
            loop {
                if x.iter().any(|v| v.abs() == r) && self.eval(&x) == 0 && self.gradient(&x).iter().any(|&g| g != 0) {
                    let g = x.iter().fold(0i64, |g, &v| g.gcd(&v));
                    return Some(x.iter().map(|v| v / g).collect());
                }
                let mut k = 0;
                loop {
                    if k == n {
                        break;
                    }
                    if x[k] < r {
                        x[k] += 1;
                        break;
                    }
                    x[k] = -r;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        }
        None
    }

    /// Builds the normalisation around a smooth primitive zero `e`.
    fn complete_hyperbolic(&self, e: &[i64]) -> Result<HyperbolicNormalization> {
        let n = self.n_vars;
        let a = self.doubled_big();
        let eb: Vec<BigInt> = e.iter().map(|&v| BigInt::from(v)).collect();
        let grad = linalg::mat_vec(&a, &eb);
        // f = e_j for the coordinate with the smallest nonzero gradient entry
        let j = (0..n)
            .filter(|&j| !grad[j].is_zero())
            .min_by(|&x, &y| grad[x].abs().cmp(&grad[y].abs()))
            .expect("smooth zero has a nonzero gradient");
        let c = grad[j].clone();
        let mut f = vec![BigInt::zero(); n];
        f[j] = BigInt::one();
        // f' = f - (Q(f)/c) e is isotropic with b(e, f') = c
        let qf = self.eval_big(&f);
        let ratio = BigRational::new(qf, c.clone());
        let f_prime: Vec<BigRational> = (0..n)
            .map(|i| BigRational::from_integer(f[i].clone()) - &ratio * BigRational::from_integer(eb[i].clone()))
            .collect();
        // integer basis of the orthogonal complement of span(e, f)
        let af = linalg::mat_vec(&a, &f);
        let w = linalg::integer_kernel(&[grad.clone(), af], n);
        debug_assert_eq!(w.len(), n - 2);
        // P = [e | f' | w_1 .. w_{n-2}] as a rational matrix with those columns
        let den = f_prime.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let mut cols: Vec<Vec<BigInt>> = vec![eb.clone()];
        cols.push(f_prime.iter().map(|v| (v * BigRational::from_integer(den.clone())).to_integer()).collect());
        cols.extend(w.iter().cloned());
        let p_scaled = linalg::transpose(&cols); // columns e, den*f', w
        let p_inv = linalg::inverse(&p_scaled).ok_or_else(|| Error::InvalidArgument("degenerate completion".into()))?;
        // coordinates of x: alpha = row0 x, beta = den * row1 x, z = rows 2.. x
        let mut coord_rows: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let cr = BigRational::from_integer(c.clone());
        let denr = BigRational::from_integer(den.clone());
        coord_rows.push(p_inv[0].iter().map(|v| v * &cr).collect());
        coord_rows.push(p_inv[1].iter().map(|v| v * &denr).collect());
        coord_rows.extend(p_inv[2..].iter().cloned());
        let d = linalg::common_denominator(&coord_rows);
        let dr = BigRational::from_integer(d.clone());
        let mut t: Vec<Vec<BigInt>> = coord_rows
            .iter()
            .map(|r| r.iter().map(|v| (v * &dr).to_integer()).collect())
            .collect();
        let mut scale = d;
        let g = t.iter().flatten().fold(scale.clone(), |g, v| g.gcd(v));
        if !g.is_one() {
            for v in t.iter_mut().flatten() {
                *v /= &g;
            }
            scale /= &g;
        }
        // Q0 = -Q(W z)
        let mut q0 = Vec::new();
        for i in 0..n - 2 {
            for k in i..n - 2 {
                let v = if i == k {
                    self.eval_big(&w[i])
                } else {
                    linalg::dot(&w[i], &linalg::mat_vec(&a, &w[k]))
                };
                let v = (-v).to_i64().ok_or_else(|| Error::InvalidArgument("Q0 coefficient exceeds 64 bits".into()))?;
                q0.push(((i, k), v));
            }
        }
        let q0 = QuadraticForm::new(n - 2, q0)?;
        let t = t
            .iter()
            .map(|r| r.iter().map(|v| v.to_i64()).collect::<Option<Vec<i64>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidArgument("transformation exceeds 64 bits".into()))?;
        let n_scale = scale.to_i64().ok_or_else(|| Error::InvalidArgument("scale exceeds 64 bits".into()))?;
        Ok(HyperbolicNormalization { t, n: n_scale, q0 })
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_polynomial().to_text(0))
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm[{}]({})", self.n_vars, self)
    }
}

/// `Q*(T x) = N^2 Q(x)` with `Q* = x0*x1 - Q0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperbolicNormalization {
    pub t: Vec<Vec<i64>>,
    pub n: i64,
    pub q0: QuadraticForm,
}

impl HyperbolicNormalization {
    pub fn target(&self) -> QuadraticForm {
        QuadraticForm::hyperbolic(&self.q0)
    }

    pub fn apply(&self, x: &[i64]) -> Vec<BigInt> {
        self.t
            .iter()
            .map(|row| row.iter().zip(x).map(|(&a, &b)| BigInt::from(a) * b).sum())
            .collect()
    }

    /// `Q*(T x) - N^2 Q(x)`, which is zero for a correct normalisation.
    pub fn defect(&self, q: &QuadraticForm, x: &[i64]) -> BigInt {
        let tx = self.apply(x);
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.target().eval_big(&tx) - BigInt::from(self.n) * self.n * q.eval_big(&xs)
    }

    pub fn det(&self) -> BigInt {
        linalg::det(&linalg::to_big(&self.t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SplitType {
    Ramified,
    Split,
    Inert,
}

impl fmt::Display for SplitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitType::Ramified => "ramified",
            SplitType::Split => "split",
            SplitType::Inert => "inert",
        })
    }
}

/// Behaviour of the prime `p` in `Q(sqrt d)`.
pub fn classify_prime(d: i64, p: u64) -> Result<SplitType> {
    if arith::is_perfect_square(d) {
        return Err(Error::PerfectSquare(d));
    }
    if !arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if (2 * d as i128) % p as i128 == 0 {
        return Ok(SplitType::Ramified);
    }
    Ok(if arith::legendre(d, p) == 1 { SplitType::Split } else { SplitType::Inert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadraticForm {
        QuadraticForm::parse(s).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(q("x0*x1 - x2*x3").rank(), 4);
        assert_eq!(QuadraticForm::parse_in("x0*x1", 0, 4).unwrap().rank(), 2);
        assert_eq!(q("x0*x1 - x2^2 - x3^2 - x4^2").rank(), 5);
    }

    #[test]
    fn indefinite_examples() {
        assert!(q("x0*x1 - x2^2").is_indefinite());
        assert!(!q("x0^2 + x1^2").is_indefinite());
        assert!(!q("-x0^2 - x1^2 - x2^2").is_indefinite());
    }

    #[test]
    fn good_prime_examples() {
        let r = q("x1^2 + x2^2 - x3^2");
        assert_eq!(r.n_vars(), 3);
        assert!(!r.is_good_prime(2));
        assert!(r.is_good_prime(5));
        assert!(!q("x1^2 - 5*x2^2 + x3^2").is_good_prime(5));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_prime(2, 2), Ok(SplitType::Ramified));
        assert_eq!(classify_prime(2, 7), Ok(SplitType::Split));
        assert_eq!(classify_prime(2, 5), Ok(SplitType::Inert));
        assert_eq!(classify_prime(4, 5), Err(Error::PerfectSquare(4)));
        assert_eq!(classify_prime(-1, 5), Ok(SplitType::Split));
    }

    #[test]
    fn normalize_identity_on_hyperbolic_shape() {
        let f = q("x0*x1 - x2^2 - x3^2 + 2*x4^2");
        let h = f.normalize_to_hyperbolic(5).unwrap();
        assert_eq!(h.n, 1);
        assert_eq!(h.q0, q("x0^2 + x1^2 - 2*x2^2"));
        assert_eq!(h.target(), f);
    }

    #[test]
    fn normalize_diagonal_form() {
        let f = q("x0^2 - x1^2 + x2^2 + x3^2 - x4^2");
        let h = f.normalize_to_hyperbolic(5).unwrap();
        assert!(!h.det().is_zero());
        for x in [[1i64, 2, 3, 4, 5], [-7, 0, 3, 11, -2], [0, 0, 0, 0, 1], [13, -17, 19, 23, -29]] {
            assert!(h.defect(&f, &x).is_zero(), "at {x:?}");
        }
    }

    #[test]
    fn normalize_errors() {
        assert_eq!(q("x0^2 + x1^2 + x2^2").normalize_to_hyperbolic(5), Err(Error::NotIndefinite));
        // anisotropic at 3, so there is no nonzero rational zero
        assert_eq!(q("x0^2 + x1^2 - 3*x2^2").normalize_to_hyperbolic(4), Err(Error::SearchExhausted(4)));
        assert!(matches!(
            q("x0^2 - x1^2").normalize_to_hyperbolic(3),
            Err(Error::RankTooSmall { rank: 2, needed: 3 })
        ));
    }
}
