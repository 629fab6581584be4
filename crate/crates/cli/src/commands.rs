use clap::Args;
use qsieve_core::enumerate::{
    affine_sieve_count, count_points_congruence, sieve_count_grid, strong_approx_search, AxisBox, SieveReport,
};
use qsieve_core::experiments::{
    codim_probe, coprime_density_experiment, probe_primes, rank4_counterexample, sieve_decay_experiment, CodimProbe,
    CounterexampleRow, DecayRow, DensityComparison, ExperimentConfig,
};
use qsieve_core::lattice::{
    build_cover_ll, build_cover_llplus, certify, lattice_of, verify_cover_ll, verify_cover_llplus, IntegerLattice,
    LatticeCertificate,
};
use qsieve_core::localdensity::{mu_coprime, sigma_p, DensityValue, DEFAULT_RESIDUE_CAP};
use qsieve_core::{Error, ExecMode, IntegerPolynomial, QuadraticForm, Result};
use serde_json::json;

use crate::{Command, Table};

/// Largest `q^m` (or `(q1 q2)^2`) swept by `--verify`.
const COVER_CHECK_CAP: u128 = 10_000_000;

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    form: String,
    #[arg(long)]
    bound: u64,
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    /// Residue class, one entry per variable (default all zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    residues: Vec<i64>,
}

#[derive(Args, Debug)]
pub struct SieveArgs {
    #[arg(long)]
    form: String,
    /// Repeat for each polynomial; variables share the form's indexing.
    #[arg(long = "poly", required = true)]
    polys: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    bound: Vec<u64>,
    #[arg(long = "m", value_delimiter = ',', required = true)]
    m: Vec<u64>,
    /// Emit the scaled decay table N M log M / B^(n-1).
    #[arg(long)]
    decay: bool,
    /// Write 0 in the elapsed_s column.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
pub struct AffineSieveArgs {
    /// Polynomials in x0, x1, ... with one variable per box side.
    #[arg(long = "poly", required = true)]
    polys: Vec<String>,
    /// Half-widths B_i of the box.
    #[arg(long = "box", value_delimiter = ',', required = true)]
    sides: Vec<f64>,
    #[arg(long = "m", value_delimiter = ',', required = true)]
    m: Vec<u64>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    form: String,
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 6)]
    kmax: u32,
    /// With `--g`, report mu_p for the pair instead of sigma_p.
    #[arg(long, requires = "g")]
    f: Option<String>,
    #[arg(long, requires = "f")]
    g: Option<String>,
}

#[derive(Args, Debug)]
pub struct CoprimeArgs {
    #[arg(long)]
    form: String,
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 150)]
    bound: u64,
    #[arg(long, default_value_t = 50)]
    pmax: u64,
    #[arg(long, default_value_t = 5)]
    kmax: u32,
    /// Also list the local factors, one row per prime, after the summary.
    #[arg(long)]
    factors: bool,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    #[arg(long)]
    form: String,
    #[arg(long)]
    modulus: u64,
    /// Check exhaustively that every residue solution is covered.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
pub struct CoverLlplusArgs {
    #[arg(long, allow_hyphen_values = true)]
    d: i64,
    #[arg(long)]
    q1: u64,
    #[arg(long, default_value_t = 1)]
    q2: u64,
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
pub struct MinimaArgs {
    /// Basis vectors separated by `;`, entries by `,`.
    #[arg(long, conflicts_with_all = ["y", "modulus"], allow_hyphen_values = true)]
    basis: Option<String>,
    /// Generator of the lattice x ≡ rho y (mod q).
    #[arg(long, value_delimiter = ',', requires = "modulus", allow_hyphen_values = true)]
    y: Vec<i64>,
    #[arg(long, requires = "y")]
    modulus: Option<u64>,
}

#[derive(Args, Debug)]
pub struct StrongApproxArgs {
    #[arg(long)]
    form: String,
    #[arg(long = "poly", required = true)]
    polys: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    target: Vec<i64>,
    #[arg(long)]
    modulus: u64,
    /// Primes allowed to divide the gcd of the values.
    #[arg(long, value_delimiter = ',')]
    allowed: Vec<u64>,
    #[arg(long, default_value_t = 20)]
    max_bound: u64,
}

#[derive(Args, Debug)]
pub struct CounterexampleArgs {
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    bounds: Vec<u64>,
    #[arg(long, default_value_t = 0.6, allow_hyphen_values = true)]
    theta: f64,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[arg(long)]
    form: String,
    #[arg(long = "poly")]
    polys: Vec<String>,
    /// Default: the first three good primes from 5 on.
    #[arg(long, value_delimiter = ',')]
    primes: Vec<u64>,
}

pub fn execute(cmd: &Command) -> Result<Table> {
    match cmd {
        Command::Count(a) => count(a),
        Command::Sieve(a) => sieve(a),
        Command::AffineSieve(a) => affine_sieve(a),
        Command::Density(a) => density(a),
        Command::Coprime(a) => coprime(a),
        Command::Cover(a) => cover(a),
        Command::CoverLlplus(a) => cover_llplus(a),
        Command::Minima(a) => minima(a),
        Command::Strongapprox(a) => strongapprox(a),
        Command::Counterexample(a) => counterexample(a),
        Command::Probe(a) => probe(a),
    }
}

/// The form and the polynomials read in its coordinates.
struct Family {
    form: QuadraticForm,
    offset: usize,
    polys: Vec<IntegerPolynomial>,
}

impl Family {
    fn parse(form: &str, polys: &[String]) -> Result<Self> {
        let (form, offset) = QuadraticForm::parse_with_offset(form)?;
        let polys = polys
            .iter()
            .map(|p| IntegerPolynomial::parse_in(p, offset, form.n_vars()))
            .collect::<Result<_>>()?;
        Ok(Family { form, offset, polys })
    }

    /// Canonical text that re-parses to the same objects.
    fn canonical(&self) -> serde_json::Value {
        json!({
            "form": self.form.to_polynomial().to_text(self.offset),
            "polys": self.polys.iter().map(|p| p.to_text(self.offset)).collect::<Vec<_>>(),
        })
    }
}

fn joined<T: ToString>(v: &[T], sep: &str) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn count(a: &CountArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &[])?;
    let n = fam.form.n_vars();
    let residues = if a.residues.is_empty() { vec![0; n] } else { a.residues.clone() };
    if residues.len() != n || a.modulus == 0 {
        return Err(Error::InvalidArgument(format!("need {n} residues and a positive modulus")));
    }
    let total = count_points_congruence(&fam.form, a.bound, a.modulus, &residues);
    let row = format!("{},{},{},{}", a.bound, a.modulus, joined(&residues, " "), total);
    Ok(Table::new("B,modulus,residues,total", vec![row]).with("canonical", fam.canonical()))
}

fn report_rows(reports: &[SieveReport], timing: bool) -> Vec<String> {
    reports.iter().map(|r| r.csv_row(timing)).collect()
}

fn sieve(a: &SieveArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &a.polys)?;
    if a.decay {
        let mut cfg = ExperimentConfig::new(fam.form.clone(), fam.polys.clone());
        cfg.b_grid = a.bound.clone();
        cfg.m_grid = a.m.clone();
        let rows = sieve_decay_experiment(&cfg)?;
        let probe = probe_primes(&fam.form);
        let mut t = Table::new(DecayRow::CSV_HEADER, rows.iter().map(DecayRow::csv_row).collect());
        if let Ok(p) = codim_probe(&fam.form, &fam.polys, &probe, &Default::default()) {
            t = t.with("codim_probe", json!({"primes": probe, "exponent": p.exponent, "codimension": p.codimension}));
        }
        return Ok(t.with("canonical", fam.canonical()));
    }
    let mut reports = Vec::new();
    for &b in &a.bound {
        reports.extend(sieve_count_grid(&fam.form, &fam.polys, b, &a.m, ExecMode::default())?);
    }
    Ok(Table::new(SieveReport::CSV_HEADER, report_rows(&reports, !a.no_timing)).with("canonical", fam.canonical()))
}

fn affine_sieve(a: &AffineSieveArgs) -> Result<Table> {
    let region = AxisBox::new(a.sides.clone())?;
    let polys: Vec<IntegerPolynomial> =
        a.polys.iter().map(|p| IntegerPolynomial::parse_in(p, 0, region.dim())).collect::<Result<_>>()?;
    let reports = a.m.iter().map(|&m| affine_sieve_count(&polys, &region, m)).collect::<Result<Vec<_>>>()?;
    Ok(Table::new(SieveReport::CSV_HEADER, report_rows(&reports, !a.no_timing))
        .with("volume", json!(region.volume()))
        .with("min_side", json!(region.min_side())))
}

fn density(a: &DensityArgs) -> Result<Table> {
    let value = match (&a.f, &a.g) {
        (Some(f), Some(g)) => {
            let fam = Family::parse(&a.form, &[f.clone(), g.clone()])?;
            mu_coprime(&fam.form, &fam.polys[0], &fam.polys[1], a.p, a.kmax)?
        }
        _ => sigma_p(&QuadraticForm::parse(&a.form)?, a.p, a.kmax)?,
    };
    Ok(Table::new(DensityValue::CSV_HEADER, vec![value.csv_row()]))
}

fn coprime(a: &CoprimeArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &[a.f.clone(), a.g.clone()])?;
    let mut cfg = ExperimentConfig::new(fam.form.clone(), fam.polys.clone());
    cfg.b_grid = vec![a.bound];
    cfg.p_max = a.pmax;
    cfg.k_max = a.kmax;
    let r = coprime_density_experiment(&cfg)?;
    let mut t = Table::new(DensityComparison::CSV_HEADER, vec![r.csv_row()]).with("canonical", fam.canonical());
    if a.factors {
        // a second table: header line then one row per prime
        t.rows.push(DensityValue::CSV_HEADER.to_string());
        t.rows.extend(r.factors.iter().map(DensityValue::csv_row));
    }
    Ok(t)
}

fn lattice_columns(cert: &LatticeCertificate) -> String {
    let lambdas: Vec<String> = cert.minima.lengths().iter().map(|l| format!("{l:.9}")).collect();
    format!("{},{},{:.9}", cert.det, lambdas.join(","), cert.pairing_max())
}

fn lambda_header(m: usize) -> String {
    (1..=m).map(|i| format!("lambda_{i}")).collect::<Vec<_>>().join(",")
}

fn cover(a: &CoverArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &[])?;
    let cover = build_cover_ll(&fam.form, a.modulus)?;
    let mut rows = Vec::new();
    for (y, l) in cover.generators.iter().zip(cover.lattices()?) {
        rows.push(format!("{},{},{}", a.modulus, joined(y, " "), lattice_columns(&certify(&l)?)));
    }
    let header = format!("q,generator,det,{},dual_pairing_max", lambda_header(cover.m));
    let mut t = Table::new(&header, rows)
        .with("generators", json!(cover.generators.len()))
        .with("size_bound", json!(cover.size_bound()))
        .with("canonical", fam.canonical());
    if a.verify {
        let check = verify_cover_ll(&fam.form, &cover, COVER_CHECK_CAP)?;
        t = t.with("solutions", json!(check.solutions)).with("uncovered", json!(check.uncovered));
    }
    Ok(t)
}

fn cover_llplus(a: &CoverLlplusArgs) -> Result<Table> {
    let cover = build_cover_llplus(a.d, a.q1, a.q2)?;
    let mut rows = Vec::new();
    for &rho in &cover.roots {
        let cert = certify(&cover.lattice(rho))?;
        rows.push(format!("{},{},{},{}", a.q1, a.q2, rho, lattice_columns(&cert)));
    }
    let mut t = Table::new(&format!("q1,q2,rho,det,{},dual_pairing_max", lambda_header(2)), rows)
        .with("lambda_max_bound", json!(cover.lambda_max_bound()));
    if a.verify {
        let check = verify_cover_llplus(&cover, COVER_CHECK_CAP)?;
        t = t.with("solutions", json!(check.solutions)).with("uncovered", json!(check.uncovered));
    }
    Ok(t)
}

fn parse_basis(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|e| Error::InvalidArgument(format!("basis entry {v:?}: {e}"))))
                .collect()
        })
        .collect()
}

fn vector_text<T: ToString>(v: &[T]) -> String {
    joined(v, " ")
}

fn minima(a: &MinimaArgs) -> Result<Table> {
    let lattice = match (&a.basis, a.modulus) {
        (Some(b), _) => IntegerLattice::from_i64(&parse_basis(b)?)?,
        (None, Some(q)) => lattice_of(&a.y, q)?,
        (None, None) => return Err(Error::InvalidArgument("give --basis or --y with --modulus".into())),
    };
    let cert = certify(&lattice)?;
    let reduced = lattice.reduced_basis()?;
    let m = lattice.dim();
    let lengths = cert.minima.lengths();
    let rows = (0..m)
        .map(|i| {
            format!(
                "{},{},{:.9},{},{},{},{:.9}",
                i + 1,
                cert.minima.squared[i],
                lengths[i],
                vector_text(&cert.minima.vectors[i]),
                cert.pairing_squared[i],
                vector_text(&reduced.basis[i]),
                reduced.ratios[i]
            )
        })
        .collect();
    Ok(Table::new("i,lambda_squared,lambda,witness,pairing_squared,reduced_vector,ratio", rows)
        .with("det", json!(cert.det.to_string()))
        .with("minkowski_ok", json!(cert.minkowski_lower && cert.minkowski_upper))
        .with("pairing_ok", json!(cert.pairing_ok))
        .with("reduction_constant", json!(reduced.constant)))
}

fn strongapprox(a: &StrongApproxArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &a.polys)?;
    let found = strong_approx_search(&fam.form, &fam.polys, &a.target, a.modulus, &a.allowed, a.max_bound)?;
    let row = match &found {
        Some(x) => format!("true,{}", joined(x, " ")),
        None => "false,".to_string(),
    };
    Ok(Table::new("found,point", vec![row]).with("canonical", fam.canonical()))
}

fn counterexample(a: &CounterexampleArgs) -> Result<Table> {
    let rows = rank4_counterexample(&a.bounds, a.theta, ExecMode::default())?;
    let holds = rows.iter().all(CounterexampleRow::holds);
    Ok(Table::new(CounterexampleRow::CSV_HEADER, rows.iter().map(CounterexampleRow::csv_row).collect())
        .with("lower_bound_holds", json!(holds)))
}

fn probe(a: &ProbeArgs) -> Result<Table> {
    let fam = Family::parse(&a.form, &a.polys)?;
    let primes = if a.primes.is_empty() { probe_primes(&fam.form) } else { a.primes.clone() };
    let cfg = qsieve_core::localdensity::DensityConfig { cap: DEFAULT_RESIDUE_CAP, ..Default::default() };
    let p = codim_probe(&fam.form, &fam.polys, &primes, &cfg)?;
    Ok(Table::new(CodimProbe::CSV_HEADER, p.csv_rows()).with("canonical", fam.canonical()))
}
