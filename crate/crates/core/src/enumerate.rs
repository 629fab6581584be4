//! Integer zeros of quadratic forms in boxes, congruence-restricted counts,
//! and the large-prime sieve counters.
//!
//! Every form is enumerated by solving for one or two variables and sweeping
//! the rest. When some pair `x_i x_j` has coefficient `±1` and neither
//! variable occurs elsewhere (the shape `x0*x1 - Q0`), the pair is recovered
//! from a divisor table of `t = x_i x_j`; otherwise a variable is solved from
//! a quadratic or linear equation.

use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{self, exact_sqrt_i128};
use crate::error::{Error, Result};
use crate::exec::{fold_grid, Axis, ExecMode};
use crate::poly::{CompiledPoly, IntegerPolynomial};
use crate::quadform::QuadraticForm;

/// The residue class `x ≡ a (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub modulus: u64,
    pub residues: Vec<i64>,
}

impl Congruence {
    pub fn new(modulus: u64, residues: Vec<i64>) -> Self {
        assert!(modulus >= 1);
        Congruence { modulus, residues }
    }

    fn matches(&self, k: usize, x: i64) -> bool {
        (x - self.residues[k]).rem_euclid(self.modulus as i64) == 0
    }

    fn axis(&self, k: usize, bound: i64) -> Axis {
        let m = self.modulus as i64;
        let start = -bound + (self.residues[k] + bound).rem_euclid(m);
        Axis::stepped(start, bound, m)
    }
}

#[derive(Debug, Clone, Copy)]
enum PlanKind {
    /// `s x_i x_j + R(rest) = 0` with `s = ±1`.
    Hyperbolic { i: usize, j: usize, s: i128 },
    /// `a x_v^2 + L x_v + R = 0`.
    Quadratic { v: usize, a: i128 },
    /// `L x_v + R = 0`.
    Linear { v: usize },
    /// The zero form: every point is a zero.
    Free,
}

#[derive(Debug, Clone)]
struct Plan {
    kind: PlanKind,
    n: usize,
    rest: Vec<usize>,
    r_terms: Vec<(usize, usize, i128)>,
    l_terms: Vec<(usize, i128)>,
}

impl Plan {
    fn new(q: &QuadraticForm) -> Self {
        let n = q.n_vars();
        let terms: Vec<((usize, usize), i64)> = q.coeffs().collect();
        let occurrences = |v: usize| terms.iter().filter(|((i, j), _)| *i == v || *j == v).count();
        let mut kind = PlanKind::Free;
        if let Some(&((i, j), c)) = terms
            .iter()
            .find(|((i, j), c)| i != j && c.abs() == 1 && occurrences(*i) == 1 && occurrences(*j) == 1)
        {
            kind = PlanKind::Hyperbolic { i, j, s: c as i128 };
        } else if let Some(&((v, _), a)) = terms.iter().find(|((i, j), _)| i == j) {
            kind = PlanKind::Quadratic { v, a: a as i128 };
        } else if let Some(&((v, _), _)) = terms.first() {
            kind = PlanKind::Linear { v };
        }
        let solved: Vec<usize> = match kind {
            PlanKind::Hyperbolic { i, j, .. } => vec![i, j],
            PlanKind::Quadratic { v, .. } | PlanKind::Linear { v } => vec![v],
            PlanKind::Free => vec![],
        };
        let rest: Vec<usize> = (0..n).filter(|k| !solved.contains(k)).collect();
        let mut r_terms = Vec::new();
        let mut l_terms = Vec::new();
        for &((i, j), c) in &terms {
            let (ri, rj) = (!solved.contains(&i), !solved.contains(&j));
            if ri && rj {
                r_terms.push((i, j, c as i128));
            } else if let PlanKind::Quadratic { v, .. } | PlanKind::Linear { v } = kind {
                if i != j {
                    l_terms.push((if i == v { j } else { i }, c as i128));
                }
            }
        }
        Plan { kind, n, rest, r_terms, l_terms }
    }

    fn r(&self, x: &[i64]) -> i128 {
        self.r_terms.iter().map(|&(i, j, c)| c * x[i] as i128 * x[j] as i128).sum()
    }

    fn l(&self, x: &[i64]) -> i128 {
        self.l_terms.iter().map(|&(k, c)| c * x[k] as i128).sum()
    }
}

/// Divisors `d <= B` of each `t <= B^2` with `t / d <= B`, in CSR layout.
struct DivisorTable {
    offsets: Vec<u32>,
    divisors: Vec<u32>,
}

impl DivisorTable {
    fn new(bound: u64) -> Self {
        let b = bound as usize;
        let top = b * b;
        let mut counts = vec![0u32; top + 2];
        for d in 1..=b {
            for k in 1..=b {
                counts[d * k + 1] += 1;
            }
        }
        for t in 1..counts.len() {
            counts[t] += counts[t - 1];
        }
        let mut fill = counts.clone();
        let mut divisors = vec![0u32; counts[top + 1] as usize];
        for d in 1..=b {
            for k in 1..=b {
                let t = d * k;
                divisors[fill[t] as usize] = d as u32;
                fill[t] += 1;
            }
        }
        DivisorTable { offsets: counts, divisors }
    }

    fn of(&self, t: u128) -> &[u32] {
        let t = t as usize;
        if t + 1 >= self.offsets.len() {
            return &[];
        }
        &self.divisors[self.offsets[t] as usize..self.offsets[t + 1] as usize]
    }
}

/// Folds `fold_op` over every `x` with `|x|_inf <= bound`, `Q(x) = 0` and, if
/// given, `x` in the residue class. Each zero is visited exactly once.
pub fn fold_points<T, ID, F, R>(
    q: &QuadraticForm,
    bound: u64,
    class: Option<&Congruence>,
    mode: ExecMode,
    identity: ID,
    fold_op: F,
    reduce_op: R,
) -> T
where
    T: Send,
    ID: Fn() -> T + Sync + Send,
    F: Fn(T, &[i64]) -> T + Sync + Send,
    R: Fn(T, T) -> T + Sync + Send,
{
    let plan = Plan::new(q);
    let b = bound as i64;
    let n = plan.n;
    if let Some(c) = class {
        assert_eq!(c.residues.len(), n, "residue vector length");
    }
    let axis_of = |k: usize| match class {
        Some(c) => c.axis(k, b),
        None => Axis::new(-b, b),
    };
    let ok = |k: usize, x: i64| class.is_none_or(|c| c.matches(k, x));
    let axes: Vec<Axis> = plan.rest.iter().map(|&k| axis_of(k)).collect();
    let table = match plan.kind {
        PlanKind::Hyperbolic { .. } => Some(DivisorTable::new(bound)),
        _ => None,
    };

    let out = fold_grid(
        mode,
        &axes,
        || (identity(), vec![0i64; n]),
        |(mut acc, mut x), pt| {
            for (&k, &v) in plan.rest.iter().zip(pt) {
                x[k] = v;
            }
            match plan.kind {
                PlanKind::Free => acc = fold_op(acc, &x),
                PlanKind::Hyperbolic { i, j, s } => {
                    let t = -s * plan.r(&x);
                    if t == 0 {
                        for y in -b..=b {
                            if ok(i, 0) && ok(j, y) {
                                x[i] = 0;
                                x[j] = y;
                                acc = fold_op(acc, &x);
                            }
                            if y != 0 && ok(i, y) && ok(j, 0) {
                                x[i] = y;
                                x[j] = 0;
                                acc = fold_op(acc, &x);
                            }
                        }
                    } else {
                        let sign = t.signum() as i64;
                        for &d in table.as_ref().unwrap().of(t.unsigned_abs()) {
                            let d = d as i64;
                            let e = (t.abs() / d as i128) as i64 * sign;
                            for (u, w) in [(d, e), (-d, -e)] {
                                if ok(i, u) && ok(j, w) {
                                    x[i] = u;
                                    x[j] = w;
                                    acc = fold_op(acc, &x);
                                }
                            }
                        }
                    }
                }
                PlanKind::Quadratic { v, a } => {
                    let l = plan.l(&x);
                    let r = plan.r(&x);
                    let disc = l * l - 4 * a * r;
                    if let Some(s) = exact_sqrt_i128(disc) {
                        let roots = if s == 0 { vec![-l] } else { vec![-l + s, -l - s] };
                        for num in roots {
                            let den = 2 * a;
                            if num % den == 0 {
                                let y = num / den;
                                if y.abs() <= b as i128 && ok(v, y as i64) {
                                    x[v] = y as i64;
                                    acc = fold_op(acc, &x);
                                }
                            }
                        }
                    }
                }
                PlanKind::Linear { v } => {
                    let l = plan.l(&x);
                    let r = plan.r(&x);
                    if l == 0 {
                        if r == 0 {
                            let ax = axis_of(v);
                            let mut y = ax.start;
                            while y <= ax.end {
                                x[v] = y;
                                acc = fold_op(acc, &x);
                                y += ax.step;
                            }
                        }
                    } else if r % l == 0 {
                        let y = -r / l;
                        if y.abs() <= b as i128 && ok(v, y as i64) {
                            x[v] = y as i64;
                            acc = fold_op(acc, &x);
                        }
                    }
                }
            }
            (acc, x)
        },
        |(a, x), (b2, _)| (reduce_op(a, b2), x),
    );
    out.0
}

/// Every zero of `q` with `|x|_inf <= bound`, sorted lexicographically.
pub fn enumerate_quadric_points(q: &QuadraticForm, bound: u64) -> Vec<Vec<i64>> {
    let mut pts = fold_points(
        q,
        bound,
        None,
        ExecMode::default(),
        Vec::new,
        |mut v, x| {
            v.push(x.to_vec());
            v
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    pts.sort_unstable();
    pts
}

/// `N(B; q, a)`: zeros in the box lying in the class `a mod q`.
pub fn count_points_congruence(q: &QuadraticForm, bound: u64, modulus: u64, a: &[i64]) -> u64 {
    count_points_congruence_with(q, bound, modulus, a, ExecMode::default())
}

pub fn count_points_congruence_with(q: &QuadraticForm, bound: u64, modulus: u64, a: &[i64], mode: ExecMode) -> u64 {
    let class = Congruence::new(modulus, a.to_vec());
    let class = (modulus > 1).then_some(&class);
    fold_points(q, bound, class, mode, || 0u64, |c, _| c + 1, |x, y| x + y)
}

pub fn count_points(q: &QuadraticForm, bound: u64) -> u64 {
    count_points_congruence(q, bound, 1, &vec![0; q.n_vars()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct SieveReport {
    pub bound: u64,
    pub m: u64,
    pub total_points: u64,
    pub sieved_points: u64,
    pub zero_locus_points: u64,
    pub elapsed_s: f64,
}

impl SieveReport {
    pub const CSV_HEADER: &'static str = "B,M,total_points,sieved_points,zero_locus_points,elapsed_s";

    pub fn csv_row(&self, timing: bool) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.bound,
            self.m,
            self.total_points,
            self.sieved_points,
            self.zero_locus_points,
            if timing { format!("{:.3}", self.elapsed_s) } else { "0".to_string() }
        )
    }
}

/// Evaluates a family of polynomials at integer points and decides whether
/// their values share a large prime.
pub(crate) struct GcdEvaluator {
    polys: Vec<IntegerPolynomial>,
    compiled: Vec<CompiledPoly>,
}

/// Gcd of the values: `Small` when it fits in `u128`.
pub(crate) enum ValueGcd {
    Small(u128),
    Big(BigInt),
}

impl GcdEvaluator {
    pub(crate) fn new(polys: &[IntegerPolynomial]) -> Self {
        GcdEvaluator { polys: polys.to_vec(), compiled: polys.iter().map(|p| p.compile()).collect() }
    }

    pub(crate) fn gcd(&self, x: &[i64]) -> ValueGcd {
        let mut g: u128 = 0;
        for c in &self.compiled {
            match c.eval(x) {
                Some(v) => g = g.gcd(&v.unsigned_abs()),
                None => return self.gcd_big(x),
            }
            if g == 1 {
                break;
            }
        }
        ValueGcd::Small(g)
    }

    fn gcd_big(&self, x: &[i64]) -> ValueGcd {
        let g = self.polys.iter().fold(BigInt::zero(), |g, p| g.gcd(&p.eval_i64(x)));
        match g.to_u128() {
            Some(s) => ValueGcd::Small(s),
            None => ValueGcd::Big(g),
        }
    }
}

impl ValueGcd {
    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, ValueGcd::Small(0))
    }

    /// Whether a prime above `m` divides the (nonzero) gcd.
    pub(crate) fn has_prime_factor_above(&self, m: u64) -> bool {
        match self {
            ValueGcd::Small(g) => arith::has_prime_factor_above(*g, m),
            ValueGcd::Big(g) => {
                let mut r = g.abs();
                for p in arith::primes_up_to(m) {
                    let pb = BigInt::from(p);
                    while (&r % &pb).is_zero() {
                        r /= &pb;
                    }
                }
                r > BigInt::from(1)
            }
        }
    }

    /// The gcd with every prime of `allowed` divided out equals one.
    pub(crate) fn supported_on(&self, allowed: &[u64]) -> bool {
        let mut r = match self {
            ValueGcd::Small(0) => return false,
            ValueGcd::Small(g) => BigInt::from(*g),
            ValueGcd::Big(g) => g.clone(),
        };
        for &p in allowed {
            let pb = BigInt::from(p);
            while (&r % &pb).is_zero() {
                r /= &pb;
            }
        }
        r == BigInt::from(1)
    }
}

fn check_family(n_vars: usize, polys: &[IntegerPolynomial]) -> Result<()> {
    if polys.is_empty() {
        return Err(Error::InvalidArgument("need at least one polynomial".into()));
    }
    if let Some(p) = polys.iter().find(|p| p.n_vars() != n_vars) {
        return Err(Error::InvalidArgument(format!(
            "polynomial has {} variables, expected {n_vars}",
            p.n_vars()
        )));
    }
    Ok(())
}

/// `N(B, M)`: zeros of `q` in the box at which the values of `forms` have a
/// common prime divisor above `M`. Points where every value vanishes are
/// counted and also reported as `zero_locus_points`.
pub fn sieve_count(q: &QuadraticForm, forms: &[IntegerPolynomial], bound: u64, m: u64) -> Result<SieveReport> {
    Ok(sieve_count_grid(q, forms, bound, &[m], ExecMode::default())?.remove(0))
}

/// One enumeration shared by several values of `M`.
pub fn sieve_count_grid(
    q: &QuadraticForm,
    forms: &[IntegerPolynomial],
    bound: u64,
    ms: &[u64],
    mode: ExecMode,
) -> Result<Vec<SieveReport>> {
    check_family(q.n_vars(), forms)?;
    let start = Instant::now();
    let eval = GcdEvaluator::new(forms);
    let k = ms.len();
    let (total, zero, sieved) = fold_points(
        q,
        bound,
        None,
        mode,
        || (0u64, 0u64, vec![0u64; k]),
        |(mut t, mut z, mut s), x| {
            t += 1;
            let g = eval.gcd(x);
            if g.is_zero() {
                z += 1;
                s.iter_mut().for_each(|c| *c += 1);
            } else {
                for (c, &m) in s.iter_mut().zip(ms) {
                    if g.has_prime_factor_above(m) {
                        *c += 1;
                    }
                }
            }
            (t, z, s)
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2.iter().zip(&b.2).map(|(x, y)| x + y).collect()),
    );
    let elapsed = start.elapsed().as_secs_f64();
    Ok(ms
        .iter()
        .zip(sieved)
        .map(|(&m, s)| SieveReport {
            bound,
            m,
            total_points: total,
            sieved_points: s,
            zero_locus_points: zero,
            elapsed_s: elapsed,
        })
        .collect())
}

/// A product of intervals `[-B_i, B_i]`, possibly with unequal sides.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox {
    bounds: Vec<f64>,
}

impl AxisBox {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.is_empty() || bounds.iter().any(|&b| !(b >= 1.0) || !b.is_finite()) {
            return Err(Error::InvalidArgument("box half-widths must be finite and at least 1".into()));
        }
        Ok(AxisBox { bounds })
    }

    pub fn cube(n: usize, b: f64) -> Result<Self> {
        Self::new(vec![b; n])
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// `V = prod B_i`.
    pub fn volume(&self) -> f64 {
        self.bounds.iter().product()
    }

    pub fn min_side(&self) -> f64 {
        self.bounds.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn axes(&self) -> Vec<Axis> {
        self.bounds
            .iter()
            .map(|&b| {
                let b = b.floor() as i64;
                Axis::new(-b, b)
            })
            .collect()
    }

    pub fn num_points(&self) -> u128 {
        crate::exec::grid_size(&self.axes())
    }
}

/// Integer points of the box at which all the `f_j` share a prime divisor
/// above `m`. `bound` in the report is the largest half-width.
pub fn affine_sieve_count(polys: &[IntegerPolynomial], region: &AxisBox, m: u64) -> Result<SieveReport> {
    affine_sieve_count_with(polys, region, m, ExecMode::default())
}

pub fn affine_sieve_count_with(polys: &[IntegerPolynomial], region: &AxisBox, m: u64, mode: ExecMode) -> Result<SieveReport> {
    check_family(region.dim(), polys)?;
    let start = Instant::now();
    let eval = GcdEvaluator::new(polys);
    let (total, zero, sieved) = fold_grid(
        mode,
        &region.axes(),
        || (0u64, 0u64, 0u64),
        |(t, z, s), x| {
            let g = eval.gcd(x);
            if g.is_zero() {
                (t + 1, z + 1, s + 1)
            } else {
                (t + 1, z, s + g.has_prime_factor_above(m) as u64)
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
    );
    Ok(SieveReport {
        bound: region.bounds.iter().cloned().fold(0.0, f64::max).floor() as u64,
        m,
        total_points: total,
        sieved_points: sieved,
        zero_locus_points: zero,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}

/// A zero `x` of `q` with `|x|_inf <= max_bound`, `x ≡ a (mod modulus)`, and
/// the gcd of the `forms` values supported on `allowed_primes`. Among the
/// candidates the one of least sup norm, then lexicographically least, is
/// returned. The zero vector is never returned.
pub fn strong_approx_search(
    q: &QuadraticForm,
    forms: &[IntegerPolynomial],
    a: &[i64],
    modulus: u64,
    allowed_primes: &[u64],
    max_bound: u64,
) -> Result<Option<Vec<i64>>> {
    check_family(q.n_vars(), forms)?;
    if a.len() != q.n_vars() || modulus == 0 {
        return Err(Error::InvalidArgument("target must have one residue per variable and a positive modulus".into()));
    }
    if q.eval(a).rem_euclid(modulus as i128) != 0 {
        return Err(Error::BadTarget(modulus));
    }
    let eval = GcdEvaluator::new(forms);
    let class = Congruence::new(modulus, a.to_vec());
    let key = |x: &[i64]| (x.iter().map(|v| v.abs()).max().unwrap_or(0), x.to_vec());
    let best = fold_points(
        q,
        max_bound,
        Some(&class),
        ExecMode::default(),
        || None::<(i64, Vec<i64>)>,
        |best, x| {
            if x.iter().all(|&v| v == 0) || !eval.gcd(x).supported_on(allowed_primes) {
                return best;
            }
            let k = key(x);
            match best {
                Some(b) if b <= k => Some(b),
                _ => Some(k),
            }
        },
        |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        },
    );
    Ok(best.map(|(_, x)| x))
}

#[cfg(test)]
mod tests {
    use super::*;
    
    fn q(s: &str) -> QuadraticForm {
        QuadraticForm::parse(s).unwrap()
    }

    fn brute(q: &QuadraticForm, b: i64) -> Vec<Vec<i64>> {
        let axes = vec![Axis::new(-b, b); q.n_vars()];
        let mut v = fold_grid(
            ExecMode::Sequential,
            &axes,
            Vec::new,
            |mut acc: Vec<Vec<i64>>, x| {
                if q.eval(x) == 0 {
                    acc.push(x.to_vec());
                }
                acc
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        v.sort();
        v
    }

    #[test]
    fn counts_on_small_boxes() {
        let f = q("x0*x1 - x2^2");
        assert_eq!(count_points(&f, 2), 17);
        assert_eq!(count_points_congruence(&f, 2, 2, &[0, 0, 0]), 9);
        assert_eq!(enumerate_quadric_points(&f, 0), vec![vec![0, 0, 0]]);
        let g = q("x0*x1 - x2^2 - x3^2");
        assert_eq!(enumerate_quadric_points(&g, 1), brute(&g, 1));
    }

    #[test]
    fn every_plan_matches_brute_force() {
        for s in [
            "x0*x1 - x2^2 - x3^2 + 2*x4^2",
            "x0*x1 - x2*x3",
            "x0^2 - x1^2 + x2^2 + x3^2 - x4^2",
            "x0*x1 + x1*x2 - x2^2",
            "x0*x1 + x1*x2 + x0*x2",
            "2*x0^2 + 3*x0*x1 - 5*x1^2 + x2^2",
            "-x0*x1 + 3*x2^2",
        ] {
            let f = q(s);
            for b in [0, 1, 3, 5] {
                assert_eq!(enumerate_quadric_points(&f, b), brute(&f, b as i64), "{s} B={b}");
            }
        }
        let zero = QuadraticForm::new(2, []).unwrap();
        assert_eq!(count_points(&zero, 2), 25);
    }

    #[test]
    fn congruence_classes_partition_the_count() {
        let f = q("x0*x1 - x2^2 - x3^2");
        let total = count_points(&f, 4);
        let mut sum = 0;
        for a in 0..27 {
            let r = [a % 3, (a / 3) % 3, a / 9, 0];
            for r3 in 0..3 {
                let mut rr = r;
                rr[3] = r3;
                sum += count_points_congruence(&f, 4, 3, &rr);
            }
        }
        assert_eq!(sum, total);
    }

    #[test]
    fn no_class_representative_gives_zero() {
        let f = q("x0*x1 - x2^2");
        // Q(1, 1, 0) = 1 is a unit mod 7 and 7 > 2B
        assert_eq!(count_points_congruence(&f, 3, 7, &[1, 1, 0]), 0);
    }

    #[test]
    fn sieve_examples() {
        let f = q("x0*x1 - x2^2");
        let x0 = IntegerPolynomial::parse_in("x0", 0, 3).unwrap();
        let x1 = IntegerPolynomial::parse_in("x1", 0, 3).unwrap();
        let x2 = IntegerPolynomial::parse_in("x2", 0, 3).unwrap();
        let r = sieve_count(&f, &[x0.clone(), x2], 5, 1000).unwrap();
        assert_eq!(r.zero_locus_points, 11);
        assert_eq!(r.sieved_points, 11);

        let r = sieve_count(&f, &[x0.clone(), x1.clone()], 9, 2).unwrap();
        let mut oracle = 0;
        let mut saw_333 = false;
        for x in brute(&f, 9) {
            let g = x[0].gcd(&x[1]) as u128;
            if g == 0 || arith::has_prime_factor_above(g, 2) {
                oracle += 1;
                saw_333 |= x == vec![3, 3, 3];
            }
        }
        assert!(saw_333);
        assert_eq!(r.sieved_points, oracle);
        assert_eq!(r.total_points, count_points(&f, 9));

        let one = IntegerPolynomial::constant(3, 1);
        assert_eq!(sieve_count(&f, &[one], 5, 1).unwrap().sieved_points, 0);
    }

    #[test]
    fn affine_examples() {
        let x1 = IntegerPolynomial::parse_in("x0", 0, 2).unwrap();
        let x2 = IntegerPolynomial::parse_in("x1", 0, 2).unwrap();
        let region = AxisBox::cube(2, 100.0).unwrap();
        let r = affine_sieve_count(&[x1.clone(), x2.clone()], &region, 10).unwrap();
        let mut oracle = 0;
        for a in -100i64..=100 {
            for b in -100i64..=100 {
                let g = a.gcd(&b);
                if g == 0 || arith::factor_u64(g as u64).iter().any(|&(p, _)| p > 10) {
                    oracle += 1;
                }
            }
        }
        assert_eq!(r.sieved_points, oracle);
        let one = IntegerPolynomial::constant(2, 1);
        assert_eq!(affine_sieve_count(&[one], &region, 3).unwrap().sieved_points, 0);
        let shifted = IntegerPolynomial::parse_in("x0 + 1", 0, 2).unwrap();
        assert_eq!(affine_sieve_count(&[x1, shifted], &region, 1).unwrap().sieved_points, 0);
    }

    #[test]
    fn strong_approx_examples() {
        let f = q("x0*x1 - x2^2 - x3^2 + x4^2");
        let one = IntegerPolynomial::constant(5, 1);
        let first = strong_approx_search(&f, &[one], &[0; 5], 1, &[], 3).unwrap().unwrap();
        assert_eq!(f.eval(&first), 0);
        assert_eq!(first.iter().map(|v| v.abs()).max(), Some(1));

        let forms: Vec<IntegerPolynomial> =
            ["x0", "x1"].iter().map(|s| IntegerPolynomial::parse_in(s, 0, 5).unwrap()).collect();
        let a = [1, 0, 0, 0, 0];
        let x = strong_approx_search(&f, &forms, &a, 2, &[2], 6).unwrap().unwrap();
        assert_eq!(f.eval(&x), 0);
        assert!(x.iter().zip(&a).all(|(u, v)| (u - v) % 2 == 0));
        let g = x[0].gcd(&x[1]);
        assert!(g != 0 && arith::factor_u64(g as u64).iter().all(|&(p, _)| p == 2));

        assert_eq!(strong_approx_search(&f, &forms, &[1, 1, 0, 0, 0], 3, &[3], 4), Err(Error::BadTarget(3)));
        // 5 has no representative mod 11 in [-4, 4]
        let far = [5, 0, 0, 0, 0];
        assert_eq!(strong_approx_search(&f, &forms, &far, 11, &[11], 4).unwrap(), None);
    }
}
