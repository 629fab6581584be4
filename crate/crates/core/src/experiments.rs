//! End-to-end runs that put empirical counts next to their predictions: the
//! coprime density of two polynomials on a quadric, decay of the large-prime
//! sieve, the rank-4 family that defeats the sieve, and a point-count probe
//! for the codimension of `Q = F_1 = ... = F_r = 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::arith;
use crate::enumerate::{fold_points, sieve_count_grid, SieveReport};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::localdensity::{decimal, fold_zeros_mod_p, predicted_coprime_density_with, DensityConfig, DensityValue};
use crate::poly::{CompiledPoly, IntegerPolynomial};
use crate::quadform::QuadraticForm;

/// Inputs shared by the experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub form: QuadraticForm,
    pub polys: Vec<IntegerPolynomial>,
    pub b_grid: Vec<u64>,
    pub m_grid: Vec<u64>,
    pub p_max: u64,
    pub k_max: u32,
    /// Recorded in manifests; nothing here is randomized.
    pub seed: u64,
    pub density: DensityConfig,
}

impl ExperimentConfig {
    pub fn new(form: QuadraticForm, polys: Vec<IntegerPolynomial>) -> Self {
        ExperimentConfig {
            form,
            polys,
            b_grid: vec![150],
            m_grid: vec![10, 20, 40, 80],
            p_max: 50,
            k_max: 5,
            seed: 0,
            density: DensityConfig::default(),
        }
    }

    pub fn mode(&self) -> ExecMode {
        self.density.mode
    }

    pub fn validate(&self) -> Result<()> {
        let increasing = |g: &[u64]| !g.is_empty() && g.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.b_grid) || !increasing(&self.m_grid) {
            return Err(Error::InvalidArgument("grids must be nonempty and increasing".into()));
        }
        if self.p_max < 2 {
            return Err(Error::InvalidArgument("p_max must be at least 2".into()));
        }
        if let Some(p) = self.polys.iter().find(|p| p.n_vars() != self.form.n_vars()) {
            return Err(Error::InvalidArgument(format!(
                "polynomial has {} variables, the form has {}",
                p.n_vars(),
                self.form.n_vars()
            )));
        }
        Ok(())
    }

    /// Config echo for run manifests. Forms and polynomials are printed in
    /// the text grammar and re-parse to the same objects.
    pub fn manifest(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("form".into(), json!(self.form.to_string()));
        m.insert("polys".into(), json!(self.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
        m.insert("b_grid".into(), json!(self.b_grid));
        m.insert("m_grid".into(), json!(self.m_grid));
        m.insert("p_max".into(), json!(self.p_max));
        m.insert("k_max".into(), json!(self.k_max));
        m.insert("seed".into(), json!(self.seed));
        m
    }
}

/// `# manifest: {...}` with the crate version added.
pub fn manifest_line(mut fields: Map<String, Value>) -> String {
    fields.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    format!("# manifest: {}", Value::Object(fields))
}

fn rank_and_sign(q: &QuadraticForm, needed: usize) -> Result<()> {
    let rank = q.rank();
    if rank < needed {
        return Err(Error::RankTooSmall { rank, needed });
    }
    if !q.is_indefinite() {
        return Err(Error::NotIndefinite);
    }
    Ok(())
}

/// Finite-`B` coprime density against the truncated Euler product.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityComparison {
    pub bound: u64,
    pub p_max: u64,
    pub k_max: u32,
    pub total_points: u64,
    pub coprime_points: u64,
    pub empirical: BigRational,
    /// `2 max |empirical(B) - empirical(B')|` over `ceil(B/2) <= B' <= B`.
    pub fluctuation: BigRational,
    pub predicted: BigRational,
    pub tail_bound: BigRational,
    pub factors: Vec<DensityValue>,
}

impl DensityComparison {
    pub const CSV_HEADER: &'static str = "B,p_max,k_max,total_points,coprime_points,empirical_num,empirical_den,empirical_decimal,predicted_num,predicted_den,predicted_decimal,tail_bound_decimal,fluctuation_decimal,abs_diff_decimal";

    pub fn abs_diff(&self) -> BigRational {
        (&self.empirical - &self.predicted).abs()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.bound,
            self.p_max,
            self.k_max,
            self.total_points,
            self.coprime_points,
            self.empirical.numer(),
            self.empirical.denom(),
            decimal(&self.empirical),
            self.predicted.numer(),
            self.predicted.denom(),
            decimal(&self.predicted),
            decimal(&self.tail_bound),
            decimal(&self.fluctuation),
            decimal(&self.abs_diff())
        )
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    if den == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

fn value_of(c: &CompiledPoly, p: &IntegerPolynomial, x: &[i64]) -> BigInt {
    match c.eval(x) {
        Some(v) => BigInt::from(v),
        None => p.eval_i64(x),
    }
}

/// Quadric points and coprime points by sup-norm shell `0..=B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoprimeShells {
    pub total: Vec<u64>,
    pub coprime: Vec<u64>,
}

impl CoprimeShells {
    pub fn bound(&self) -> u64 {
        self.total.len() as u64 - 1
    }

    /// `(total, coprime)` over the box `[-b, b]^n`.
    pub fn counts_at(&self, b: u64) -> (u64, u64) {
        let k = b as usize + 1;
        (self.total[..k].iter().sum(), self.coprime[..k].iter().sum())
    }

    pub fn empirical_at(&self, b: u64) -> BigRational {
        let (t, c) = self.counts_at(b);
        ratio(c, t)
    }

    /// `2 max |emp(B) - emp(B')|` over `ceil(B/2) <= B' <= B`.
    pub fn fluctuation(&self) -> BigRational {
        let b = self.bound();
        let mut t: u64 = 0;
        let mut c: u64 = 0;
        let mut ratios = Vec::with_capacity(self.total.len());
        for (dt, dc) in self.total.iter().zip(&self.coprime) {
            t += dt;
            c += dc;
            ratios.push(ratio(c, t));
        }
        let last = ratios.last().unwrap();
        let widest = ratios[b.div_ceil(2) as usize..]
            .iter()
            .map(|r| (r - last).abs())
            .max()
            .unwrap_or_else(BigRational::zero);
        widest * BigRational::from_integer(BigInt::from(2))
    }
}

/// One enumeration of the quadric in `[-B, B]^n`, recording for each shell
/// how many points have `gcd(f, g) = 1`.
pub fn coprime_shells(
    q: &QuadraticForm,
    f: &IntegerPolynomial,
    g: &IntegerPolynomial,
    bound: u64,
    mode: ExecMode,
) -> CoprimeShells {
    let (cf, cg) = (f.compile(), g.compile());
    let len = bound as usize + 1;
    let one = BigInt::from(1);
    let (total, coprime) = fold_points(
        q,
        bound,
        None,
        mode,
        || (vec![0u64; len], vec![0u64; len]),
        |(mut t, mut c), x| {
            let shell = x.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0) as usize;
            t[shell] += 1;
            if value_of(&cf, f, x).gcd(&value_of(&cg, g, x)) == one {
                c[shell] += 1;
            }
            (t, c)
        },
        |(mut t, mut c), (t2, c2)| {
            t.iter_mut().zip(t2).for_each(|(a, b)| *a += b);
            c.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
            (t, c)
        },
    );
    CoprimeShells { total, coprime }
}

/// Compares the share of box points with `gcd(f, g) = 1` at the last bound
/// of the grid with the truncated product of local densities.
pub fn coprime_density_experiment(cfg: &ExperimentConfig) -> Result<DensityComparison> {
    cfg.validate()?;
    rank_and_sign(&cfg.form, 5)?;
    let [f, g] = cfg.polys.as_slice() else {
        return Err(Error::InvalidArgument("expected exactly two polynomials f, g".into()));
    };
    let bound = *cfg.b_grid.last().unwrap();
    let shells = coprime_shells(&cfg.form, f, g, bound, cfg.mode());
    let (total, coprime) = shells.counts_at(bound);
    let pred = predicted_coprime_density_with(&cfg.form, f, g, cfg.p_max, cfg.k_max, &cfg.density)?;
    Ok(DensityComparison {
        bound,
        p_max: cfg.p_max,
        k_max: cfg.k_max,
        total_points: total,
        coprime_points: coprime,
        empirical: ratio(coprime, total),
        fluctuation: shells.fluctuation(),
        predicted: pred.product,
        tail_bound: pred.tail_bound,
        factors: pred.factors,
    })
}

/// One grid point of the sieve decay table.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayRow {
    pub report: SieveReport,
    /// `N(B, M) M log M / B^(n-1)` with `n + 1` variables.
    pub scaled: f64,
}

impl DecayRow {
    pub const CSV_HEADER: &'static str = "B,M,N,total_points,zero_locus_points,scaled";

    pub fn csv_row(&self) -> String {
        let r = &self.report;
        format!("{},{},{},{},{},{:.6e}", r.bound, r.m, r.sieved_points, r.total_points, r.zero_locus_points, self.scaled)
    }
}

pub fn scaled_sieve_count(count: u64, bound: u64, m: u64, n_vars: usize) -> f64 {
    let m = m as f64;
    count as f64 * m * m.ln() / (bound as f64).powi(n_vars as i32 - 2)
}

/// `N(B, M)` over the whole `B x M` grid, one enumeration per `B`.
pub fn sieve_decay_experiment(cfg: &ExperimentConfig) -> Result<Vec<DecayRow>> {
    cfg.validate()?;
    let n = cfg.form.n_vars();
    let mut rows = Vec::new();
    for &b in &cfg.b_grid {
        for report in sieve_count_grid(&cfg.form, &cfg.polys, b, &cfg.m_grid, cfg.mode())? {
            let scaled = scaled_sieve_count(report.sieved_points, b, report.m, n);
            rows.push(DecayRow { report, scaled });
        }
    }
    Ok(rows)
}

/// Largest over smallest of a set of positive values around their geometric
/// mean: every value lies within `spread` of the mean.
pub fn geometric_spread(values: &[f64]) -> f64 {
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    logs.iter().map(|l| (l - mean).abs().exp()).fold(1.0, f64::max)
}

/// One bound of the rank-4 family.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub bound: u64,
    pub theta: f64,
    pub m: u64,
    pub sieved: u64,
    pub oracle_lower: u64,
}

impl CounterexampleRow {
    pub const CSV_HEADER: &'static str = "B,theta,M,N,oracle_lower,oracle_ratio";

    /// `oracle_lower / B^2`.
    pub fn oracle_ratio(&self) -> f64 {
        self.oracle_lower as f64 / (self.bound as f64 * self.bound as f64)
    }

    pub fn holds(&self) -> bool {
        self.sieved >= self.oracle_lower
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{:.6}", self.bound, self.theta, self.m, self.sieved, self.oracle_lower, self.oracle_ratio())
    }
}

/// Points `(a, 0, c, 0)` with `|a|, |c| <= B`, `gcd(a, c) = 1` and `c`
/// divisible by a prime in `(M, B]`. All lie on `x0 x1 = x2 x3` and have a
/// common prime above `M` in `(x1, x2, x3)`.
pub fn rank4_family_count(bound: u64, m: u64) -> u64 {
    let b = bound as i64;
    let big: Vec<i64> = arith::primes_up_to(bound).into_iter().filter(|&p| p > m).map(|p| p as i64).collect();
    let mut total = 0;
    for c in 1..=b {
        if !big.iter().any(|p| c % p == 0) {
            continue;
        }
        let coprime = (-b..=b).filter(|a| a.gcd(&c) == 1).count() as u64;
        // c and -c
        total += 2 * coprime;
    }
    total
}

pub fn rank4_form() -> QuadraticForm {
    QuadraticForm::parse("x0*x1 - x2*x3").expect("valid form")
}

/// `M = floor(B^theta)` for `theta` in `(1/2, 3/4]`.
pub fn sieve_level(bound: u64, theta: f64) -> Result<u64> {
    if !(theta > 0.5 && theta <= 0.75) {
        return Err(Error::BadExponent(theta));
    }
    // guard against 64^0.5-style roundoff just below an integer
    let m = (bound as f64).powf(theta);
    Ok((m + 1e-9).floor() as u64)
}

/// Runs `x0 x1 - x2 x3` with `F = {x1, x2, x3}` at `M = floor(B^theta)` and
/// compares with the explicit family.
pub fn rank4_counterexample(b_grid: &[u64], theta: f64, mode: ExecMode) -> Result<Vec<CounterexampleRow>> {
    let q = rank4_form();
    let forms: Vec<IntegerPolynomial> = (1..4).map(|i| IntegerPolynomial::var(4, i)).collect();
    b_grid
        .iter()
        .map(|&b| {
            let m = sieve_level(b, theta)?;
            let report = sieve_count_grid(&q, &forms, b, &[m], mode)?.remove(0);
            Ok(CounterexampleRow { bound: b, theta, m, sieved: report.sieved_points, oracle_lower: rank4_family_count(b, m) })
        })
        .collect()
}

/// Affine point counts of `Q = F_1 = ... = F_r = 0` over `F_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodimProbe {
    pub n_vars: usize,
    /// `(p, affine count, log count / log p)`.
    pub counts: Vec<(u64, u64, f64)>,
    pub exponent: f64,
    /// Codimension in projective space, `n_vars - round(exponent)`.
    pub codimension: i64,
}

impl CodimProbe {
    pub const CSV_HEADER: &'static str = "p,affine_count,exponent,estimated_codimension";

    pub fn csv_rows(&self) -> Vec<String> {
        self.counts
            .iter()
            .map(|(p, c, e)| format!("{p},{c},{e:.6},{}", self.codimension))
            .collect()
    }
}

/// Default probe primes: the first three odd primes at least 5 that are good
/// for `q`.
pub fn probe_primes(q: &QuadraticForm) -> Vec<u64> {
    arith::primes_up_to(1000).into_iter().filter(|&p| p >= 5 && q.is_good_prime(p)).take(3).collect()
}

/// Estimates the codimension of `Q = F = 0` in `P^(n-1)` from the growth of
/// its `F_p`-point counts. Advisory: a point-count fit, not a proof.
pub fn codim_probe(q: &QuadraticForm, polys: &[IntegerPolynomial], primes: &[u64], cfg: &DensityConfig) -> Result<CodimProbe> {
    if primes.is_empty() {
        return Err(Error::InvalidArgument("probe needs at least one prime".into()));
    }
    let n = q.n_vars();
    let mut counts = Vec::new();
    for &p in primes {
        let count = fold_zeros_mod_p(
            q,
            p,
            cfg,
            || 0u64,
            |acc, x| acc + polys.iter().all(|f| f.eval_mod(x, p) == 0) as u64,
            |a, b| a + b,
        )?;
        counts.push((p, count, (count as f64).ln() / (p as f64).ln()));
    }
    // the origin alone gives exponent 0; take the largest growth seen
    let exponent = counts.iter().map(|c| c.2).fold(0.0, f64::max);
    Ok(CodimProbe { n_vars: n, counts, exponent, codimension: n as i64 - exponent.round() as i64 })
}
