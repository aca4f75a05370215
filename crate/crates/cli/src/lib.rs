//! Problem-file schema, certificate cache management, and the command
//! implementations behind the `chebrisk` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use chebrisk_core::error::Error;
use chebrisk_core::indicator::{
    approximate_indicator, CertificateCache, IntervalSet,
};
use chebrisk_core::mc::{mc_risk, McEstimate, SampleConfig, DEFAULT_SEED};
use chebrisk_core::moments::Marginal;
use chebrisk_core::risk::{estimate, DegreeSpec, EstimateConfig, RiskBounds, RiskProblem};
use chebrisk_core::sdp::SolverConfig;
use chebrisk_core::{Constraint, MultiPoly, Result};

/// Reference bounds for the moving-hole example at increasing degree,
/// used by the `table1` command to report deltas.
pub const REFERENCE_TABLE: [(usize, f64, f64); 6] = [
    (20, 0.92, 0.401),
    (30, 0.879, 0.485),
    (40, 0.859, 0.511),
    (50, 0.822, 0.562),
    (60, 0.804, 0.586),
    (66, 0.798, 0.591),
];

// ---------------------------------------------------------------------------
// problem files

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VariableDecl {
    pub name: String,
    #[serde(flatten)]
    pub dist: Marginal,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermDecl {
    pub exponents: Vec<u32>,
    pub coeff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstraintDecl {
    pub poly: Vec<TermDecl>,
    pub l: f64,
    pub u: f64,
}

/// On-disk description of a risk problem.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ProblemFile {
    pub variables: Vec<VariableDecl>,
    pub constraints: Vec<ConstraintDecl>,
    pub degree: usize,
    #[serde(default)]
    pub notes: String,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let file: ProblemFile = serde_json::from_str(&text)?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        if self.variables.is_empty() {
            return Err(Error::InvalidProblem("problem declares no variables".into()));
        }
        if self.constraints.is_empty() {
            return Err(Error::InvalidProblem("problem declares no constraints".into()));
        }
        let nvars = self.variables.len();
        for (ci, c) in self.constraints.iter().enumerate() {
            for t in &c.poly {
                if t.exponents.len() != nvars {
                    return Err(Error::InvalidProblem(format!(
                        "constraint {ci}: term exponents must list all {nvars} declared variables"
                    )));
                }
                if !t.coeff.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "constraint {ci}: non-finite coefficient"
                    )));
                }
            }
        }
        for v in &self.variables {
            v.dist.validate()?;
        }
        Ok(())
    }

    pub fn to_risk_problem(&self) -> Result<RiskProblem> {
        self.validate()?;
        let nvars = self.variables.len();
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint {
                poly: MultiPoly::from_terms(
                    nvars,
                    c.poly.iter().map(|t| (t.exponents.clone(), t.coeff)),
                ),
                lower: c.l,
                upper: c.u,
            })
            .collect();
        let margins = self.variables.iter().map(|v| v.dist.clone()).collect();
        Ok(RiskProblem { constraints, margins, degree: self.degree })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// Cache directory resolution: explicit flag, then the CHEBRISK_CACHE
/// environment variable, then ./chebrisk-cache.
pub fn resolve_cache_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("CHEBRISK_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("chebrisk-cache"))
}

/// Exit code for an error: 2 validation, 3 solver failure, 4 moment
/// instability.
pub fn exit_code(err: &Error) -> i32 {
    fn root(e: &Error) -> &Error {
        match e {
            Error::Stage { source, .. } => root(source),
            other => other,
        }
    }
    match root(err) {
        Error::SolverFailure { .. } => 3,
        Error::MomentInstability { .. } => 4,
        _ => 2,
    }
}

// ---------------------------------------------------------------------------
// commands

pub struct ApproxReport {
    pub key: String,
    pub degree: usize,
    pub objective: f64,
    pub grid_violation: f64,
    pub seconds: f64,
    pub cached: bool,
}

/// Solve (or refresh) one indicator certificate and store it in the cache.
pub fn cmd_approximate(
    target: (f64, f64),
    complement: bool,
    degree: usize,
    cache_dir: &Path,
    dump_sdp: Option<&Path>,
    refresh: bool,
) -> Result<ApproxReport> {
    let base = IntervalSet::interval(target.0, target.1)?;
    let set = if complement { base.complement() } else { base };
    let cfg = SolverConfig::default();
    let cache = CertificateCache::new(cache_dir)?;
    if let Some(path) = dump_sdp {
        let even_d = degree + degree % 2;
        let problem = chebrisk_core::indicator::build_sdp(&set, even_d)?;
        fs::write(path, problem.dump_triplets())?;
    }
    let clock = Instant::now();
    let (cert, key, solved) = if refresh {
        let cert = approximate_indicator(&set, degree, &cfg)?;
        let key = cache.store(&cert, &cfg)?;
        (cert, key, true)
    } else {
        cache.fetch_or_solve(&set, degree, &cfg)?
    };
    Ok(ApproxReport {
        key,
        degree: cert.degree,
        objective: cert.objective_value,
        grid_violation: cert.residuals.grid_violation,
        seconds: clock.elapsed().as_secs_f64(),
        cached: !solved,
    })
}

/// Degree selection accepted by `eval`.
#[derive(Clone, Debug)]
pub enum DegreeChoice {
    FromFile,
    Fixed(usize),
    Auto,
}

pub struct EvalReport {
    pub problem: String,
    pub bounds: RiskBounds,
}

/// Evaluate the risk bounds of a problem file using cached certificates,
/// optionally solving missing ones.
pub fn cmd_eval(
    problem_path: &Path,
    cache_dir: &Path,
    degree: DegreeChoice,
    solve_missing: bool,
    csv: Option<&Path>,
) -> Result<EvalReport> {
    let file = ProblemFile::load(problem_path)?;
    let problem = file.to_risk_problem()?;
    let cache = CertificateCache::new(cache_dir)?;
    let cfg = EstimateConfig {
        solver: SolverConfig::default(),
        degree: match degree {
            DegreeChoice::FromFile => None,
            DegreeChoice::Fixed(d) => Some(DegreeSpec::Fixed(d)),
            DegreeChoice::Auto => {
                Some(DegreeSpec::Auto { max: 120, budget_seconds: 120.0 })
            }
        },
    };
    if !solve_missing {
        ensure_certificates_present(&problem, &cache, &cfg)?;
    }
    let bounds = estimate(&problem, &cache, &cfg)?;
    let name = problem_path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
    if let Some(csv_path) = csv {
        append_csv(
            csv_path,
            "problem,degree_used,validity_degree,p_l,p_u,offline_s,online_s",
            &format!(
                "{},{},{},{:.6},{:.6},{:.3},{:.6}",
                name,
                bounds.degree_used,
                bounds.validity_degree,
                bounds.lower,
                bounds.upper,
                bounds.offline_seconds,
                bounds.online_seconds
            ),
        )?;
    }
    Ok(EvalReport { problem: name.into(), bounds })
}

/// Without --solve-missing, eval requires every needed certificate to be
/// cached already. The needed degree depends on moment validity, so this
/// runs the cheap moment stage to find it.
fn ensure_certificates_present(
    problem: &RiskProblem,
    cache: &CertificateCache,
    cfg: &EstimateConfig,
) -> Result<()> {
    use chebrisk_core::propagate::{moment_validity_degree, z_moments_cheb};
    let prepared = chebrisk_core::risk::prepare(problem)?;
    let requested = match &cfg.degree {
        Some(DegreeSpec::Fixed(d)) => *d,
        _ => problem.degree,
    };
    let mut targets = Vec::new();
    if prepared.constraints.len() == 1 {
        let c = &prepared.constraints[0];
        let mz = z_moments_cheb(&c.poly, &prepared.margins, requested)?;
        let d_used = requested.min(moment_validity_degree(&mz));
        let d_even = d_used - d_used % 2;
        let target = IntervalSet::interval(c.lower, c.upper)?;
        targets.push((target.complement(), d_even));
        targets.push((target, d_even));
    } else {
        for c in &prepared.constraints {
            let d_even = requested - requested % 2;
            targets.push((IntervalSet::interval(c.lower, c.upper)?, d_even));
        }
    }
    for (target, d) in targets {
        let key = CertificateCache::key(&target, d, &cfg.solver);
        if cache.load(&key)?.is_none() {
            return Err(Error::MissingCertificate { key });
        }
    }
    Ok(())
}

pub struct McReport {
    pub problem: String,
    pub estimate: McEstimate,
    pub seconds: f64,
}

pub fn cmd_mc(
    problem_path: &Path,
    samples: usize,
    seed: Option<u64>,
    csv: Option<&Path>,
) -> Result<McReport> {
    let file = ProblemFile::load(problem_path)?;
    let problem = file.to_risk_problem()?;
    let cfg = SampleConfig {
        n: samples,
        seed: seed.unwrap_or(DEFAULT_SEED),
        ..Default::default()
    };
    let clock = Instant::now();
    let est = mc_risk(&problem, &cfg)?;
    let seconds = clock.elapsed().as_secs_f64();
    let name = problem_path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
    if let Some(csv_path) = csv {
        append_csv(
            csv_path,
            "problem,n,seed,estimate,ci",
            &format!("{},{},{},{:.6},{:.6}", name, est.n, est.seed, est.estimate, est.ci_halfwidth),
        )?;
    }
    Ok(McReport { problem: name.into(), estimate: est, seconds })
}

/// The moving-hole example: z = 0.5(x - q) with x uniform on
/// [-0.5, 0.5], q beta-distributed on [0, 1], and target [-0.4, 0].
pub fn moving_hole_problem(degree: usize) -> RiskProblem {
    let sq2 = std::f64::consts::SQRT_2;
    RiskProblem {
        constraints: vec![Constraint {
            poly: MultiPoly::from_terms(2, vec![(vec![1, 0], 0.5), (vec![0, 1], -0.5)]),
            lower: -0.4,
            upper: 0.0,
        }],
        margins: vec![
            Marginal::uniform(-0.5, 0.5),
            Marginal::beta(3.0 - sq2, 3.0 + sq2, 0.0, 1.0),
        ],
        degree,
    }
}

pub struct Table1Row {
    pub degree: usize,
    pub p_u: f64,
    pub p_l: f64,
    pub ref_p_u: f64,
    pub ref_p_l: f64,
}

pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub seconds: f64,
}

/// Run the moving-hole example for the reference degrees and emit a CSV
/// with the computed bounds, the reference values, and deltas.
pub fn cmd_table1(out_csv: &Path, cache_dir: &Path) -> Result<Table1Report> {
    let cache = CertificateCache::new(cache_dir)?;
    let clock = Instant::now();
    let mut rows = Vec::new();
    for &(d, ref_pu, ref_pl) in REFERENCE_TABLE.iter() {
        let problem = moving_hole_problem(d);
        let bounds = estimate(&problem, &cache, &EstimateConfig::default())?;
        rows.push(Table1Row { degree: d, p_u: bounds.upper, p_l: bounds.lower, ref_p_u: ref_pu, ref_p_l: ref_pl });
    }
    let mut out = String::from("d,p_u,p_l,ref_p_u,ref_p_l,delta_u,delta_l\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.3},{:.3},{:+.6},{:+.6}\n",
            r.degree,
            r.p_u,
            r.p_l,
            r.ref_p_u,
            r.ref_p_l,
            r.p_u - r.ref_p_u,
            r.p_l - r.ref_p_l
        ));
    }
    fs::write(out_csv, out)?;
    Ok(Table1Report { rows, seconds: clock.elapsed().as_secs_f64() })
}

fn append_csv(path: &Path, header: &str, row: &str) -> Result<()> {
    let need_header = !path.exists();
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    if need_header {
        writeln!(f, "{header}")?;
    }
    writeln!(f, "{row}")?;
    Ok(())
}
