//! Exact dense linear algebra over Z, Q and F_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn to_rational(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(x).fold(BigInt::zero(), |acc, (r, v)| acc + r * v))
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Rank over Q by fraction-free elimination.
pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let mut a = m.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (x, y) = (a[r][c].clone(), a[i][c].clone());
            for j in c..cols {
                a[i][j] = &a[i][j] * &x - &a[r][j] * &y;
            }
        }
        r += 1;
    }
    r
}

/// Rank over F_p of an integer matrix.
pub fn rank_mod_p(m: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let pi = p as u128;
    let mut a: Vec<Vec<u128>> = m
        .iter()
        .map(|r| r.iter().map(|v| v.mod_floor(&pb).try_into().unwrap()).collect())
        .collect();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, piv);
        let inv = crate::arith::pow_mod(a[r][c] as u64, p - 2, p) as u128;
        for i in r + 1..rows {
            if a[i][c] == 0 {
                continue;
            }
            let f = a[i][c] * inv % pi;
            for j in c..cols {
                a[i][j] = (a[i][j] + pi * pi - f * a[r][j] % pi) % pi;
            }
        }
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix (Bareiss).
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Inverse over Q, or `None` when singular.
pub fn inverse(m: &[Vec<BigInt>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut a = to_rational(m);
    let mut inv = to_rational(&identity(n));
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let pivot = a[c][c].clone();
        for j in 0..n {
            a[c][j] = &a[c][j] / &pivot;
            inv[c][j] = &inv[c][j] / &pivot;
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
                let t = &f * &inv[c][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

/// Least common denominator of a rational matrix.
pub fn common_denominator(m: &[Vec<BigRational>]) -> BigInt {
    m.iter().flatten().fold(BigInt::one(), |l, v| l.lcm(v.denom()))
}

/// Signs of the pivots of a symmetric congruence diagonalisation:
/// `(positive, negative)` counts. The rank is their sum.
pub fn signature(sym: &[Vec<BigInt>]) -> (usize, usize) {
    let n = sym.len();
    let mut a = to_rational(sym);
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // add row/column j to k: the new diagonal entry is 2 a[k][j]
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            } else {
                continue;
            }
        }
        let pivot = a[k][k].clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for c in 0..n {
                let t = &f * &a[k][c];
                a[i][c] -= t;
            }
            for r in 0..n {
                let t = &f * &a[r][k];
                a[r][i] -= t;
            }
        }
    }
    (pos, neg)
}

/// Integer row echelon form (Hermite normal form) of the leading `pivot_cols`
/// columns, carrying the remaining columns along. Pivots are positive and the
/// entries above each pivot are reduced into `[0, pivot)`. Returns the reduced
/// rows and the number of pivot rows; rows after those are zero in the pivot
/// columns.
pub fn row_hnf(mut a: IntMatrix, pivot_cols: usize) -> (IntMatrix, usize) {
    let rows = a.len();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let mut found = false;
        loop {
            let piv = (r..rows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(piv) = piv else { break };
            found = true;
            a.swap(r, piv);
            let mut clean = true;
            for i in r + 1..rows {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !a[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = a[r].clone();
        for i in 0..r {
            let q = a[i][c].div_floor(&pivot_row[c]);
            if q.is_zero() {
                continue;
            }
            for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                *x -= &q * y;
            }
        }
        r += 1;
    }
    (a, r)
}

/// A basis of the lattice generated by `generators` (vectors in Z^m), in
/// Hermite normal form; zero generators are allowed.
pub fn lattice_basis(generators: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let m = generators[0].len();
    let (a, r) = row_hnf(generators.to_vec(), m);
    a.into_iter().take(r).collect()
}

/// A basis of `{z in Z^n : m z = 0}` for an integer matrix with `n` columns.
pub fn integer_kernel(m: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = m.len();
    // rows (column j of m | e_j); reduce on the first k columns
    let rows: IntMatrix = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = m.iter().map(|r| r[j].clone()).collect();
            row.extend((0..n).map(|i| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let (a, r) = row_hnf(rows, k);
    a.into_iter().skip(r).map(|row| row[k..].to_vec()).collect()
}
