//! Full-rank integer lattices: Hermite bases, exact successive minima, duals,
//! LLL reduction, and the covers of congruence solution sets by lattices
//! `{x : x ≡ rho y (mod q)}`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{check_cap, Error, Result};
use crate::exec::{fold_grid, map_items, Axis, ExecMode};
use crate::linalg;
use crate::localdensity::{fold_zeros_mod_p, DensityConfig};
use crate::quadform::{classify_prime, QuadraticForm, SplitType};

/// Largest dimension handled by exact minima enumeration.
pub const MAX_EXACT_DIM: usize = 8;

/// Cap on lattice vectors visited by one short-vector enumeration.
pub const ENUMERATION_CAP: u128 = 20_000_000;

fn norm2(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Volume of the Euclidean unit ball in dimension `m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    // V_m = 2 pi / m * V_(m-2), V_0 = 1, V_1 = 2
    let mut v = if m.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if m.is_multiple_of(2) { 2 } else { 3 };
    while k <= m {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Upper constant in `prod lambda_i <= (2^m / V_m) det`.
pub fn minkowski_constant(m: usize) -> f64 {
    2f64.powi(m as i32) / unit_ball_volume(m)
}

/// Length bound `|b_j| <= c_m lambda_j` of an LLL-reduced basis (`delta = 3/4`).
pub fn lll_constant(m: usize) -> f64 {
    2f64.powf((m as f64 - 1.0) / 2.0)
}

/// A full-rank sublattice of `Z^m` given by `m` basis vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerLattice {
    basis: Vec<Vec<BigInt>>,
    det_abs: BigInt,
}

impl IntegerLattice {
    pub fn from_basis(basis: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = basis.len();
        if m == 0 || basis.iter().any(|b| b.len() != m) {
            return Err(Error::InvalidArgument("basis must be m vectors in Z^m".into()));
        }
        let det_abs = linalg::det(&basis).abs();
        if det_abs.is_zero() {
            return Err(Error::InvalidArgument("basis vectors are dependent".into()));
        }
        Ok(IntegerLattice { basis, det_abs })
    }

    pub fn from_i64(basis: &[Vec<i64>]) -> Result<Self> {
        Self::from_basis(linalg::to_big(basis))
    }

    /// The lattice generated by any spanning set of integer vectors.
    pub fn generated_by(generators: &[Vec<BigInt>]) -> Result<Self> {
        Self::from_basis(linalg::lattice_basis(generators))
    }

    pub fn standard(m: usize) -> Self {
        Self::from_basis(linalg::identity(m)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors (the columns of the basis matrix).
    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn det_abs(&self) -> &BigInt {
        &self.det_abs
    }

    /// Coordinates of `x` in the basis, if `x` is in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let bt = linalg::transpose(&self.basis);
        let inv = linalg::inverse(&bt)?;
        let xr: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        inv.iter()
            .map(|row| {
                let c: BigRational = row.iter().zip(&xr).map(|(a, b)| a * b).sum();
                c.is_integer().then(|| c.to_integer())
            })
            .collect()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    /// Fast membership test for repeated queries with small entries.
    pub fn membership(&self) -> Option<Membership> {
        Membership::new(self)
    }

    pub fn lll(&self) -> Vec<Vec<BigInt>> {
        lll_reduce(&self.basis)
    }

    /// Exact Euclidean successive minima with witness vectors.
    pub fn successive_minima(&self) -> Result<Minima> {
        let m = self.dim();
        if m > MAX_EXACT_DIM {
            return Err(Error::DimensionTooLarge(m));
        }
        let reduced = self.lll();
        let radius2 = reduced.iter().map(|b| norm2(b)).max().unwrap();
        let mut found = short_vectors(&reduced, &radius2)?;
        found.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        let mut chosen: Vec<Vec<BigInt>> = Vec::new();
        let mut norms = Vec::new();
        for (n2, v) in found {
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if linalg::rank(&trial) == trial.len() {
                chosen = trial;
                norms.push(n2);
                if chosen.len() == m {
                    break;
                }
            }
        }
        debug_assert_eq!(chosen.len(), m);
        Ok(Minima { squared: norms, vectors: chosen })
    }

    /// `Λ* = {t : t·x ∈ Z for all x ∈ Λ}` as `scaled / denominator`.
    pub fn dual(&self) -> DualLattice {
        // rows of B^-1 (B with basis columns) form a dual basis
        let b = linalg::transpose(&self.basis);
        let inv = linalg::inverse(&b).expect("full rank");
        let den = linalg::common_denominator(&inv);
        let denr = BigRational::from_integer(den.clone());
        let scaled: Vec<Vec<BigInt>> = inv.iter().map(|row| row.iter().map(|v| (v * &denr).to_integer()).collect()).collect();
        DualLattice { denominator: den, scaled: IntegerLattice::from_basis(scaled).unwrap() }
    }

    /// An LLL-reduced basis with the achieved ratios `|e_j| / lambda_j`.
    pub fn reduced_basis(&self) -> Result<ReducedBasis> {
        let minima = self.successive_minima()?;
        // sorted by length the j-th vector is at least lambda_j and still
        // within the LLL bound, since |b_i| <= c_m lambda_i for every i
        let mut basis = self.lll();
        basis.sort_by_key(|b| norm2(b));
        let ratios = basis
            .iter()
            .zip(minima.lengths())
            .map(|(b, l)| norm2(b).to_f64().unwrap().sqrt() / l)
            .collect();
        Ok(ReducedBasis { basis, ratios, constant: lll_constant(self.dim()) })
    }
}

/// `x ∈ Λ` iff `adj(B) x ≡ 0 (mod det B)`, in fixed width.
#[derive(Debug, Clone)]
pub struct Membership {
    adj: Vec<Vec<i128>>,
    det: i128,
}

impl Membership {
    fn new(l: &IntegerLattice) -> Option<Self> {
        let b = linalg::transpose(&l.basis);
        let det = linalg::det(&b);
        let inv = linalg::inverse(&b)?;
        let detr = BigRational::from_integer(det.clone());
        let adj = inv
            .iter()
            .map(|row| row.iter().map(|v| (v * &detr).to_integer().to_i128()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Membership { adj, det: det.to_i128()?.abs() })
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.adj.iter().all(|row| {
            let s = row.iter().zip(x).fold(0i128, |acc, (&a, &v)| (acc + a * v as i128) % self.det);
            s == 0
        })
    }
}

/// Squared successive minima and linearly independent vectors attaining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Minima {
    pub squared: Vec<BigInt>,
    pub vectors: Vec<Vec<BigInt>>,
}

impl Minima {
    pub fn lengths(&self) -> Vec<f64> {
        self.squared.iter().map(|s| s.to_f64().unwrap().sqrt()).collect()
    }

    pub fn largest(&self) -> f64 {
        *self.lengths().last().unwrap()
    }
}

/// `Λ* = scaled / denominator`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLattice {
    pub denominator: BigInt,
    pub scaled: IntegerLattice,
}

impl DualLattice {
    /// Squared minima of the dual as exact rationals.
    pub fn squared_minima(&self) -> Result<Vec<BigRational>> {
        let d2 = &self.denominator * &self.denominator;
        Ok(self
            .scaled
            .successive_minima()?
            .squared
            .into_iter()
            .map(|s| BigRational::new(s, d2.clone()))
            .collect())
    }

    pub fn contains(&self, t: &[BigRational]) -> bool {
        let d = BigRational::from_integer(self.denominator.clone());
        let scaled: Option<Vec<BigInt>> = t
            .iter()
            .map(|v| {
                let s = v * &d;
                s.is_integer().then(|| s.to_integer())
            })
            .collect();
        scaled.is_some_and(|s| self.scaled.contains(&s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBasis {
    pub basis: Vec<Vec<BigInt>>,
    pub ratios: Vec<f64>,
    pub constant: f64,
}

/// Certificate of the standard inequalities for one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCertificate {
    pub det: BigInt,
    pub minima: Minima,
    pub dual_minima_squared: Vec<BigRational>,
    /// `det <= prod lambda_i`, checked exactly on squares.
    pub minkowski_lower: bool,
    /// `prod lambda_i <= (2^m / V_m) det`.
    pub minkowski_upper: bool,
    /// `(lambda_i lambda*_{m+1-i})^2`, exact.
    pub pairing_squared: Vec<BigRational>,
    /// Every pairing lies in `[1, m!]`.
    pub pairing_ok: bool,
}

impl LatticeCertificate {
    pub fn pairing_max(&self) -> f64 {
        self.pairing_squared
            .iter()
            .map(|s| crate::localdensity::ratio_to_f64(s).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn all_ok(&self) -> bool {
        self.minkowski_lower && self.minkowski_upper && self.pairing_ok
    }
}

pub fn certify(l: &IntegerLattice) -> Result<LatticeCertificate> {
    let m = l.dim();
    let minima = l.successive_minima()?;
    let dual = l.dual().squared_minima()?;
    let det = l.det_abs().clone();
    let prod2: BigInt = minima.squared.iter().product();
    let minkowski_lower = prod2 >= &det * &det;
    let prod = minima.lengths().iter().product::<f64>();
    let minkowski_upper = prod <= minkowski_constant(m) * det.to_f64().unwrap() * (1.0 + 1e-9);
    let fact2 = BigRational::from_integer(BigInt::from(factorial(m)).pow(2));
    let pairing_squared: Vec<BigRational> = (0..m)
        .map(|i| BigRational::from_integer(minima.squared[i].clone()) * &dual[m - 1 - i])
        .collect();
    let pairing_ok = pairing_squared.iter().all(|s| *s >= BigRational::one() && *s <= fact2);
    Ok(LatticeCertificate { det, minima, dual_minima_squared: dual, minkowski_lower, minkowski_upper, pairing_squared, pairing_ok })
}

/// LLL reduction with `delta = 3/4`, exact rational Gram-Schmidt.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut b = basis.to_vec();
    let m = b.len();
    if m <= 1 {
        return b;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let gram_schmidt = |b: &[Vec<BigInt>]| -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let n = b.len();
        let mut mu = vec![vec![BigRational::zero(); n]; n];
        let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut bnorm = Vec::with_capacity(n);
        for i in 0..n {
            let bi: Vec<BigRational> = b[i].iter().map(|v| BigRational::from_integer(v.clone())).collect();
            let mut v = bi.clone();
            for j in 0..i {
                let dotp: BigRational = bi.iter().zip(&star[j]).map(|(a, c)| a * c).sum();
                mu[i][j] = dotp / &bnorm[j];
                for (x, s) in v.iter_mut().zip(&star[j]) {
                    *x -= &mu[i][j] * s;
                }
            }
            let nn: BigRational = v.iter().map(|x| x * x).sum();
            bnorm.push(nn);
            star.push(v);
        }
        (mu, bnorm)
    };
    let (mut mu, mut bn) = gram_schmidt(&b);
    let mut k = 1;
    while k < m {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let r = mu[k][j].round().to_integer();
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
                let rr = BigRational::from_integer(r);
                for l in 0..=j {
                    let t = if l == j { BigRational::one() } else { mu[j][l].clone() };
                    mu[k][l] = &mu[k][l] - &rr * t;
                }
            }
        }
        let lhs = &bn[k] + &mu[k][k - 1] * &mu[k][k - 1] * &bn[k - 1];
        if lhs >= &delta * &bn[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (mu, bn) = gram_schmidt(&b);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Every nonzero lattice vector with squared norm at most `radius2`, with its
/// exact squared norm, by Fincke-Pohst enumeration over `basis`.
fn short_vectors(basis: &[Vec<BigInt>], radius2: &BigInt) -> Result<Vec<(BigInt, Vec<BigInt>)>> {
    let m = basis.len();
    let bf: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect()).collect();
    // floating Gram-Schmidt for the search bounds only
    let mut star: Vec<Vec<f64>> = Vec::new();
    let mut bn = vec![0.0; m];
    let mut mu = vec![vec![0.0; m]; m];
    for i in 0..m {
        let mut v = bf[i].clone();
        for j in 0..i {
            mu[i][j] = bf[i].iter().zip(&star[j]).map(|(a, b)| a * b).sum::<f64>() / bn[j];
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * s;
            }
        }
        bn[i] = v.iter().map(|x| x * x).sum();
        star.push(v);
    }
    let r2 = radius2.to_f64().unwrap() * (1.0 + 1e-9) + 1e-6;
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; m];
    let mut visited: u128 = 0;
    // depth-first over coefficients from the last basis vector down
    fn recurse(
        i: usize,
        partial: f64,
        coeffs: &mut Vec<i64>,
        ctx: &(&[Vec<BigInt>], &Vec<Vec<f64>>, &Vec<f64>, f64, &BigInt),
        out: &mut Vec<(BigInt, Vec<BigInt>)>,
        visited: &mut u128,
    ) -> Result<()> {
        let (basis, mu, bn, r2, radius2) = *ctx;
        let m = basis.len();
        let center: f64 = -(i + 1..m).map(|j| mu[j][i] * coeffs[j] as f64).sum::<f64>();
        let slack = (r2 - partial).max(0.0);
        let width = (slack / bn[i]).sqrt();
        let lo = (center - width).ceil() as i64;
        let hi = (center + width).floor() as i64;
        for c in lo..=hi {
            *visited += 1;
            check_cap(*visited, ENUMERATION_CAP)?;
            coeffs[i] = c;
            let d = c as f64 - center;
            let next = partial + d * d * bn[i];
            if next > r2 {
                continue;
            }
            if i == 0 {
                if coeffs.iter().all(|&x| x == 0) {
                    continue;
                }
                let v: Vec<BigInt> = (0..m)
                    .map(|k| (0..m).map(|j| BigInt::from(coeffs[j]) * &basis[j][k]).sum())
                    .collect();
                let n2 = norm2(&v);
                if n2 <= *radius2 {
                    out.push((n2, v));
                }
            } else {
                recurse(i - 1, next, coeffs, ctx, out, visited)?;
            }
        }
        coeffs[i] = 0;
        Ok(())
    }
    let ctx = (basis, &mu, &bn, r2, radius2);
    recurse(m - 1, 0.0, &mut coeffs, &ctx, &mut out, &mut visited)?;
    Ok(out)
}

/// `Λ(y) = {x : x ≡ rho y (mod q) for some rho}`, a basis in Hermite form.
pub fn lattice_of(y: &[i64], q: u64) -> Result<IntegerLattice> {
    let m = y.len();
    let g = y.iter().fold(q as i64, |g, &v| g.gcd(&v));
    if g != 1 {
        return Err(Error::NotPrimitiveModQ(q));
    }
    let mut gens = vec![y.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()];
    for i in 0..m {
        let mut e = vec![BigInt::zero(); m];
        e[i] = BigInt::from(q);
        gens.push(e);
    }
    let l = IntegerLattice::generated_by(&gens)?;
    debug_assert_eq!(*l.det_abs(), BigInt::from(q).pow(m as u32 - 1));
    Ok(l)
}

/// A nonzero `s` with `s·y ≡ 0 (mod q)` and `|s| <= m! q / threshold`, when
/// the largest minimum of `Λ(y)` exceeds `threshold`; `None` otherwise.
pub fn short_dual_witness(y: &[i64], q: u64, threshold: f64) -> Result<Option<Vec<BigInt>>> {
    let l = lattice_of(y, q)?;
    let m = y.len();
    if l.successive_minima()?.largest() <= threshold {
        return Ok(None);
    }
    // q Λ* is exactly {s : s·y ≡ 0 mod q}
    let dual = l.dual();
    let factor = BigInt::from(q) / &dual.denominator;
    let shortest = &dual.scaled.successive_minima()?.vectors[0];
    let s: Vec<BigInt> = shortest.iter().map(|v| v * &factor).collect();
    let dotp: BigInt = s.iter().zip(y).map(|(a, &b)| a * b).sum();
    debug_assert!(dotp.mod_floor(&BigInt::from(q)).is_zero());
    debug_assert!(norm2(&s).to_f64().unwrap().sqrt() <= factorial(m) as f64 * q as f64 / threshold + 1e-9);
    Ok(Some(s))
}

fn squarefree_primes(q: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    arith::factor_u64(q)
        .into_iter()
        .map(|(p, e)| if e == 1 { Ok(p) } else { Err(Error::InvalidArgument(format!("{q} is not squarefree"))) })
        .collect()
}

/// All combinations of one residue vector per prime, merged by CRT.
fn crt_product(per_prime: &[(u64, Vec<Vec<i64>>)], m: usize) -> Vec<Vec<i64>> {
    let mut acc: Vec<(Vec<i128>, i128)> = vec![(vec![0; m], 1)];
    for (p, reps) in per_prime {
        let mut next = Vec::with_capacity(acc.len() * reps.len());
        for (v, modulus) in &acc {
            for r in reps {
                let combined: Vec<i128> = (0..m)
                    .map(|i| arith::crt(&[v[i], r[i] as i128], &[*modulus, *p as i128]).0)
                    .collect();
                next.push((combined, modulus * *p as i128));
            }
        }
        acc = next;
    }
    let mut out: Vec<Vec<i64>> = acc.into_iter().map(|(v, _)| v.into_iter().map(|x| x as i64).collect()).collect();
    out.sort();
    out
}

/// Generators `y` whose lattices `Λ(y)` cover every solution of
/// `R(x) ≡ 0 (mod q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverLL {
    pub q: u64,
    pub m: usize,
    pub generators: Vec<Vec<i64>>,
    pub omega_q: usize,
}

impl CoverLL {
    /// `(3m)^omega(q) q^(m-2)`.
    pub fn size_bound(&self) -> f64 {
        (3.0 * self.m as f64).powi(self.omega_q as i32) * (self.q as f64).powi(self.m as i32 - 2)
    }

    pub fn lattices(&self) -> Result<Vec<IntegerLattice>> {
        self.generators.iter().map(|y| lattice_of(y, self.q)).collect()
    }
}

pub fn build_cover_ll(r: &QuadraticForm, q: u64) -> Result<CoverLL> {
    build_cover_ll_with(r, q, &DensityConfig::default())
}

pub fn build_cover_ll_with(r: &QuadraticForm, q: u64, cfg: &DensityConfig) -> Result<CoverLL> {
    let m = r.n_vars();
    let rank = r.rank();
    if rank < 3 {
        return Err(Error::RankTooSmall { rank, needed: 3 });
    }
    let primes = squarefree_primes(q)?;
    for &p in &primes {
        if !r.is_good_prime(p) {
            return Err(Error::NotGoodModulus(p));
        }
    }
    if q == 1 {
        let mut e1 = vec![0; m];
        e1[0] = 1;
        return Ok(CoverLL { q, m, generators: vec![e1], omega_q: 0 });
    }
    let per_prime: Vec<Result<(u64, Vec<Vec<i64>>)>> = map_items(cfg.mode, &primes, |&p| {
        // one representative per scalar class: first nonzero coordinate 1
        let mut reps = fold_zeros_mod_p(
            r,
            p,
            &DensityConfig { mode: ExecMode::Sequential, ..*cfg },
            Vec::new,
            |mut acc: Vec<Vec<i64>>, x| {
                if x.iter().find(|&&v| v != 0) == Some(&1) {
                    acc.push(x.iter().map(|&v| v as i64).collect());
                }
                acc
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )?;
        reps.sort();
        Ok((p, reps))
    });
    let per_prime: Vec<(u64, Vec<Vec<i64>>)> = per_prime.into_iter().collect::<Result<_>>()?;
    Ok(CoverLL { q, m, generators: crt_product(&per_prime, m), omega_q: primes.len() })
}

/// Result of an exhaustive covering check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCheck {
    pub solutions: u64,
    pub uncovered: u64,
}

/// Sweeps all residues mod `modulus` that solve `is_solution` and checks
/// each lies in one of the lattices. Lattices must contain `modulus Z^m`.
fn check_covering<S>(m: usize, modulus: u64, lattices: &[IntegerLattice], is_solution: S, cap: u128) -> Result<CoveringCheck>
where
    S: Fn(&[i64]) -> bool + Sync + Send,
{
    check_cap((modulus as u128).saturating_pow(m as u32), cap)?;
    let tests: Vec<Membership> = lattices
        .iter()
        .map(|l| l.membership().ok_or_else(|| Error::InvalidArgument("lattice entries too large".into())))
        .collect::<Result<_>>()?;
    let axes = vec![Axis::new(0, modulus as i64 - 1); m];
    let (solutions, uncovered) = fold_grid(
        ExecMode::default(),
        &axes,
        || (0u64, 0u64),
        |(s, u), x| {
            if !is_solution(x) {
                return (s, u);
            }
            let covered = tests.iter().any(|t| t.contains(x));
            (s + 1, u + (!covered) as u64)
        },
        |a, b| (a.0 + b.0, a.1 + b.1),
    );
    Ok(CoveringCheck { solutions, uncovered })
}

/// Exhaustive check over `(Z/qZ)^m` that every solution of `R ≡ 0` is covered.
pub fn verify_cover_ll(r: &QuadraticForm, cover: &CoverLL, cap: u128) -> Result<CoveringCheck> {
    let lattices = cover.lattices()?;
    let q = cover.q as i128;
    check_covering(cover.m, cover.q, &lattices, |x| r.eval(x).rem_euclid(q) == 0, cap)
}

/// Lattices `{x : x1 ≡ rho x2 (mod q1), x1 ≡ x2 ≡ 0 (mod q2)}` for the square
/// roots `rho` of `d` modulo `q1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverLLPlus {
    pub d: i64,
    pub q1: u64,
    pub q2: u64,
    pub roots: Vec<u64>,
}

impl CoverLLPlus {
    pub fn lattice(&self, rho: u64) -> IntegerLattice {
        let q2 = self.q2 as i64;
        IntegerLattice::from_i64(&[vec![rho as i64 * q2, q2], vec![self.q1 as i64 * q2, 0]]).unwrap()
    }

    pub fn lattices(&self) -> Vec<IntegerLattice> {
        self.roots.iter().map(|&r| self.lattice(r)).collect()
    }

    /// `(2/sqrt 3) sqrt(|d| q1) q2`.
    pub fn lambda_max_bound(&self) -> f64 {
        2.0 / 3f64.sqrt() * ((self.d.unsigned_abs() * self.q1) as f64).sqrt() * self.q2 as f64
    }
}

pub fn build_cover_llplus(d: i64, q1: u64, q2: u64) -> Result<CoverLLPlus> {
    if arith::is_perfect_square(d) {
        return Err(Error::PerfectSquare(d));
    }
    let p1 = squarefree_primes(q1)?;
    let p2 = squarefree_primes(q2)?;
    if q1.gcd(&q2) != 1 {
        return Err(Error::InvalidArgument("q1 and q2 must be coprime".into()));
    }
    for &p in &p1 {
        if classify_prime(d, p)? != SplitType::Split {
            return Err(Error::BadSplitType { d, p });
        }
    }
    for &p in &p2 {
        if classify_prime(d, p)? != SplitType::Inert {
            return Err(Error::BadSplitType { d, p });
        }
    }
    let per_prime: Vec<(u64, Vec<Vec<i64>>)> = p1
        .iter()
        .map(|&p| {
            let r = arith::sqrt_mod_prime(d, p).expect("split prime has a root");
            let mut roots = vec![vec![r as i64], vec![(p - r) as i64]];
            roots.sort();
            (p, roots)
        })
        .collect();
    let roots = crt_product(&per_prime, 1).into_iter().map(|v| v[0] as u64).collect();
    Ok(CoverLLPlus { d, q1, q2, roots })
}

pub fn verify_cover_llplus(cover: &CoverLLPlus, cap: u128) -> Result<CoveringCheck> {
    let modulus = cover.q1 * cover.q2;
    let mi = modulus as i128;
    let d = cover.d as i128;
    check_covering(
        2,
        modulus,
        &cover.lattices(),
        |x| (x[0] as i128 * x[0] as i128 - d * x[1] as i128 * x[1] as i128).rem_euclid(mi) == 0,
        cap,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn standard_lattice() {
        let z = IntegerLattice::standard(4);
        let mn = z.successive_minima().unwrap();
        assert!(mn.squared.iter().all(|s| s == &BigInt::one()));
        assert_eq!(z.dual().scaled, z);
        assert_eq!(z.dual().denominator, BigInt::one());
        let rb = z.reduced_basis().unwrap();
        assert!(rb.ratios.iter().all(|&r| r == 1.0));
    }

    #[test]
    fn coordinate_axis_lattice() {
        let l = lattice_of(&[1, 0, 0], 5).unwrap();
        assert_eq!(*l.det_abs(), BigInt::from(25));
        let mn = l.successive_minima().unwrap();
        assert_eq!(mn.squared, big(&[1, 25, 25]));
        let cert = certify(&l).unwrap();
        assert!(cert.all_ok());
        assert!(cert.pairing_squared.iter().all(|s| s.is_one()));
        let dual = l.dual();
        let fifth = BigRational::new(BigInt::one(), BigInt::from(5));
        assert!(dual.contains(&[BigRational::zero(), fifth.clone(), BigRational::zero()]));
        assert!(!dual.contains(&[fifth, BigRational::zero(), BigRational::zero()]));
        assert!(l.reduced_basis().unwrap().ratios.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        assert_eq!(lattice_of(&[5, 10, 0], 5), Err(Error::NotPrimitiveModQ(5)));
    }

    #[test]
    fn plane_lattice_minima() {
        // x1 ≡ 3 x2 (mod 7)
        let l = IntegerLattice::from_i64(&[vec![3, 1], vec![7, 0]]).unwrap();
        assert_eq!(l.successive_minima().unwrap().squared, big(&[5, 10]));
        // brute force over |x|^2 <= 10
        let mut norms: Vec<i64> = Vec::new();
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                if (a, b) != (0, 0) && (a - 3 * b).rem_euclid(7) == 0 {
                    norms.push(a * a + b * b);
                }
            }
        }
        norms.sort();
        assert_eq!(norms[0], 5);
    }

    #[test]
    fn witness_examples() {
        let s = short_dual_witness(&[1, 0, 0], 5, 3.0).unwrap().unwrap();
        assert_eq!(norm2(&s), BigInt::one());
        assert!(s[0].is_zero());
        assert_eq!(short_dual_witness(&[1, 2, 3], 7, 7.0).unwrap(), None);
    }

    #[test]
    fn conic_covers() {
        let r = QuadraticForm::parse("x1^2 + x2^2 - x3^2").unwrap();
        for (q, count) in [(5u64, 6usize), (7, 8), (35, 48)] {
            let c = build_cover_ll(&r, q).unwrap();
            assert_eq!(c.generators.len(), count);
            assert!((count as f64) <= c.size_bound());
            for y in &c.generators {
                assert_eq!(r.eval(y).rem_euclid(q as i128), 0);
            }
            let check = verify_cover_ll(&r, &c, 10_000_000).unwrap();
            assert_eq!(check.uncovered, 0);
        }
        let one = build_cover_ll(&r, 1).unwrap();
        assert_eq!(one.lattices().unwrap()[0], IntegerLattice::standard(3));
        assert_eq!(build_cover_ll(&r, 2), Err(Error::NotGoodModulus(2)));
        assert!(matches!(build_cover_ll(&QuadraticForm::parse("x0^2 - x1^2").unwrap(), 5), Err(Error::RankTooSmall { .. })));
    }

    #[test]
    fn llplus_examples() {
        let c = build_cover_llplus(2, 7, 1).unwrap();
        assert_eq!(c.roots, vec![3, 4]);
        assert_eq!(verify_cover_llplus(&c, 1_000_000).unwrap().uncovered, 0);
        let l3 = c.lattice(3);
        let mn = l3.successive_minima().unwrap();
        assert_eq!(mn.squared, big(&[5, 10]));
        assert!(mn.largest() <= c.lambda_max_bound());
        let c5 = build_cover_llplus(2, 7, 5).unwrap();
        assert!(c5.lattices().iter().all(|l| *l.det_abs() == BigInt::from(175)));
        assert_eq!(build_cover_llplus(2, 5, 1), Err(Error::BadSplitType { d: 2, p: 5 }));
        assert_eq!(build_cover_llplus(4, 7, 1), Err(Error::PerfectSquare(4)));
    }

    #[test]
    fn lll_bound_holds() {
        let l = IntegerLattice::from_i64(&[vec![1, 0, 0, 31], vec![0, 1, 0, 17], vec![0, 0, 1, 5], vec![0, 0, 0, 101]]).unwrap();
        let rb = l.reduced_basis().unwrap();
        assert!(rb.ratios.iter().all(|&r| r <= rb.constant + 1e-9));
        assert!(certify(&l).unwrap().all_ok());
    }
}
