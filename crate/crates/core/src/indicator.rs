//! Chebyshev polynomial over-approximations of interval indicator
//! functions, produced by univariate sum-of-squares optimization.
//!
//! For a target union of intervals K inside [-1, 1], the program minimizes
//! the integral of p over [-1, 1] subject to `p >= 1` on K and `p >= 0` on
//! [-1, 1]. Nonnegativity on an interval [a, b] uses the even-degree
//! interval decomposition `p = s0 + (z - a)(b - z) s1` with `s0`, `s1`
//! sums of squares, which is exact for univariate polynomials and keeps
//! the Gram blocks as small as possible.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, DMat};
use crate::poly::{cheb_integral_weight, ChebSeries, UNIVARIATE_DEGREE_CAP};
use crate::sdp::{solve, EqRow, SdpProblem, SolveStatus, SolverConfig};

/// Union of disjoint closed intervals inside [-1, 1], sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for &(a, b) in &intervals {
            if !(-1.0..=1.0).contains(&a) || !(-1.0..=1.0).contains(&b) || a > b {
                return Err(Error::InvalidProblem(format!(
                    "interval [{a}, {b}] must satisfy -1 <= a <= b <= 1"
                )));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidProblem(format!(
                    "intervals [{}, {}] and [{}, {}] must be disjoint",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(IntervalSet { intervals })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        IntervalSet::new(vec![(a, b)])
    }

    pub fn full() -> Self {
        IntervalSet { intervals: vec![(-1.0, 1.0)] }
    }

    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, z: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= z && z <= b)
    }

    /// Closure of [-1, 1] minus the interiors of the member intervals.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = -1.0;
        for &(a, b) in &self.intervals {
            if a > cursor {
                out.push((cursor, a));
            } else if a == cursor && !out.is_empty() {
                // touching intervals share a boundary point; keep closure
            }
            cursor = cursor.max(b);
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        // the complement of an empty set is the whole box
        if self.intervals.is_empty() {
            return IntervalSet::full();
        }
        IntervalSet { intervals: out }
    }
}

/// Residual summary of a solved certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub min_eig: f64,
    pub grid_violation: f64,
    pub reconstruction: f64,
}

/// A solved indicator approximation: Chebyshev coefficients plus the Gram
/// matrices certifying the nonnegativity constraints.
#[derive(Clone, Debug)]
pub struct IndicatorCertificate {
    pub target: IntervalSet,
    pub degree: usize,
    pub requested_degree: usize,
    pub coeffs: ChebSeries,
    /// Gram blocks in builder order; empty when loaded from the cache.
    pub gram_blocks: Vec<DMat>,
    pub objective_value: f64,
    pub solver_status: String,
    pub residuals: CertResiduals,
}

/// Grid feasibility tolerance.
pub const TOL_FEAS: f64 = 1e-6;
/// Gram eigenvalue floor.
pub const TOL_PSD: f64 = 1e-7;
/// Gram-to-coefficient reconstruction tolerance.
pub const TOL_RECON: f64 = 1e-7;

/// Assemble the SOS program for the indicator of `target` at even degree
/// `d`. Decision variables are the Chebyshev coefficients (free) plus one
/// Gram pair per target interval and one for global nonnegativity.
pub fn build_sdp(target: &IntervalSet, d: usize) -> Result<SdpProblem> {
    if !d.is_multiple_of(2) {
        return Err(Error::InvalidProblem("build_sdp requires an even degree".into()));
    }
    if d + 2 > UNIVARIATE_DEGREE_CAP {
        return Err(Error::DegreeCapExceeded { cap: UNIVARIATE_DEGREE_CAP - 2, needed: d });
    }
    if target.is_empty() {
        return Err(Error::InvalidProblem("cannot build a program for an empty target".into()));
    }
    let r0 = d / 2;
    let has_s1 = d >= 2;
    let n0 = r0 + 1;
    let n1 = r0; // s1 basis T_0..T_{r0-1}, degree d-2

    // block layout: per interval [s0, s1?], then global [s2, s3?]
    let mut block_dims = Vec::new();
    for _ in 0..target.intervals().len() + 1 {
        block_dims.push(n0);
        if has_s1 {
            block_dims.push(n1);
        }
    }
    let nb = block_dims.len();
    let blocks_per_group = if has_s1 { 2 } else { 1 };

    // coefficient extraction tables: for a Gram entry (i, j) of a block
    // with multiplier g, the contribution to the T_t coefficient is the
    // t-th Chebyshev coefficient of T_i T_j g (doubling of off-diagonal
    // entries happens in the solver's inner product convention)
    let pair_series = |i: usize, j: usize, g: &ChebSeries| -> ChebSeries {
        ChebSeries::basis(i)
            .mul(&ChebSeries::basis(j))
            .and_then(|p| p.mul(g))
            .expect("degrees are bounded by the cap check above")
    };

    let mut equalities = Vec::new();
    let one = ChebSeries::constant(1.0);
    for (gi, &(a, b)) in target.intervals().iter().enumerate() {
        // g(z) = (z - a)(b - z) in the Chebyshev basis
        let g_interval =
            ChebSeries::from_coeffs(vec![-0.5 - a * b, a + b, -0.5]);
        // rows: [s0 + g s1]_t - c_t = -1[t = 0]
        let mut rows: Vec<EqRow> = (0..=d)
            .map(|t| EqRow {
                rhs: if t == 0 { -1.0 } else { 0.0 },
                block_entries: vec![Vec::new(); nb],
                free_entries: vec![(t, -1.0)],
            })
            .collect();
        let b0 = gi * blocks_per_group;
        fill_block_entries(&mut rows, b0, n0, &one, &pair_series);
        if has_s1 {
            fill_block_entries(&mut rows, b0 + 1, n1, &g_interval, &pair_series);
        }
        equalities.extend(rows);
    }
    // global nonnegativity: [s2 + (1 - z^2) s3]_t - c_t = 0
    {
        let g_box = ChebSeries::from_coeffs(vec![0.5, 0.0, -0.5]);
        let mut rows: Vec<EqRow> = (0..=d)
            .map(|t| EqRow {
                rhs: 0.0,
                block_entries: vec![Vec::new(); nb],
                free_entries: vec![(t, -1.0)],
            })
            .collect();
        let b0 = target.intervals().len() * blocks_per_group;
        fill_block_entries(&mut rows, b0, n0, &one, &pair_series);
        if has_s1 {
            fill_block_entries(&mut rows, b0 + 1, n1, &g_box, &pair_series);
        }
        equalities.extend(rows);
    }

    let obj_free: Vec<f64> = (0..=d).map(cheb_integral_weight).collect();
    Ok(SdpProblem {
        obj_blocks: vec![Vec::new(); nb],
        obj_free,
        block_dims,
        free_dim: d + 1,
        equalities,
    })
}

fn fill_block_entries<F>(rows: &mut [EqRow], block: usize, n: usize, g: &ChebSeries, pair: &F)
where
    F: Fn(usize, usize, &ChebSeries) -> ChebSeries,
{
    for i in 0..n {
        for j in i..n {
            let series = pair(i, j, g);
            for (t, row) in rows.iter_mut().enumerate() {
                let c = series.coefficient(t);
                if c != 0.0 {
                    row.block_entries[block].push((i, j, c));
                }
            }
        }
    }
}

/// Solve for the indicator approximation of `target` at degree `d` (odd
/// degrees round up). An empty target yields the zero polynomial without
/// solving.
pub fn approximate_indicator(
    target: &IntervalSet,
    d: usize,
    cfg: &SolverConfig,
) -> Result<IndicatorCertificate> {
    if target.is_empty() {
        return Ok(IndicatorCertificate {
            target: target.clone(),
            degree: 0,
            requested_degree: d,
            coeffs: ChebSeries::zero(),
            gram_blocks: Vec::new(),
            objective_value: 0.0,
            solver_status: "empty-target".into(),
            residuals: CertResiduals {
                primal: 0.0,
                dual: 0.0,
                gap: 0.0,
                min_eig: 0.0,
                grid_violation: 0.0,
                reconstruction: 0.0,
            },
        });
    }
    let even_d = d + d % 2;
    let problem = build_sdp(target, even_d)?;
    let sol = solve(&problem, cfg)?;
    if sol.status != SolveStatus::Optimal {
        return Err(Error::SolverFailure {
            status: sol.status.as_str().into(),
            detail: format!(
                "primal_inf={:.3e} dual_inf={:.3e} gap={:.3e} after {} iterations",
                sol.residuals.primal_inf, sol.residuals.dual_inf, sol.residuals.gap, sol.iterations
            ),
        });
    }
    let coeffs = ChebSeries::from_coeffs(sol.free.clone());
    let mut cert = IndicatorCertificate {
        target: target.clone(),
        degree: even_d,
        requested_degree: d,
        coeffs,
        gram_blocks: sol.blocks,
        objective_value: sol.primal_objective,
        solver_status: sol.status.as_str().into(),
        residuals: CertResiduals {
            primal: sol.residuals.primal_inf,
            dual: sol.residuals.dual_inf,
            gap: sol.residuals.gap,
            min_eig: sol.residuals.min_eig,
            grid_violation: 0.0,
            reconstruction: 0.0,
        },
    };
    let report = validate_certificate(&cert, 4000);
    cert.residuals.grid_violation = report.grid_violation;
    cert.residuals.reconstruction = report.reconstruction;
    Ok(cert)
}

/// A-posteriori audit of a certificate, independent of the solver: grid
/// feasibility, Gram eigenvalue floors, and reconstruction of the
/// coefficients from the Gram decomposition.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub min_on_box: f64,
    pub min_on_target: f64,
    pub gram_min_eig: f64,
    pub reconstruction: f64,
    pub grid_violation: f64,
    pub pass: bool,
}

pub fn validate_certificate(cert: &IndicatorCertificate, grid_n: usize) -> ValidationReport {
    assert!(grid_n >= 1000, "audit grids below 1000 points prove little");
    if cert.target.is_empty() {
        return ValidationReport {
            min_on_box: 0.0,
            min_on_target: f64::INFINITY,
            gram_min_eig: 0.0,
            reconstruction: 0.0,
            grid_violation: 0.0,
            pass: true,
        };
    }
    let mut min_on_box = f64::INFINITY;
    for k in 0..grid_n {
        let z = -1.0 + 2.0 * k as f64 / (grid_n - 1) as f64;
        min_on_box = min_on_box.min(cert.coeffs.eval(z));
    }
    let mut min_on_target = f64::INFINITY;
    for &(a, b) in cert.target.intervals() {
        for k in 0..grid_n {
            let z = a + (b - a) * k as f64 / (grid_n - 1) as f64;
            min_on_target = min_on_target.min(cert.coeffs.eval(z) - 1.0);
        }
    }
    let (gram_min_eig, reconstruction) = if cert.gram_blocks.is_empty() {
        (cert.residuals.min_eig, cert.residuals.reconstruction)
    } else {
        let ge = cert
            .gram_blocks
            .iter()
            .map(min_eigenvalue)
            .fold(f64::INFINITY, f64::min);
        (ge, reconstruction_residual(cert))
    };
    let grid_violation = (-min_on_box).max(-min_on_target).max(0.0);
    let pass = min_on_box >= -TOL_FEAS
        && min_on_target >= -TOL_FEAS
        && gram_min_eig >= -TOL_PSD
        && reconstruction <= TOL_RECON.max(cert.residuals.primal * 10.0);
    ValidationReport { min_on_box, min_on_target, gram_min_eig, reconstruction, grid_violation, pass }
}

/// Expand each Gram pair back into Chebyshev coefficients and compare with
/// the stored coefficient vector.
fn reconstruction_residual(cert: &IndicatorCertificate) -> f64 {
    let d = cert.degree;
    let has_s1 = d >= 2;
    let blocks_per_group = if has_s1 { 2 } else { 1 };
    let mut worst = 0.0f64;
    let one = ChebSeries::constant(1.0);
    let groups: Vec<(ChebSeries, f64)> = cert
        .target
        .intervals()
        .iter()
        .map(|&(a, b)| (ChebSeries::from_coeffs(vec![-0.5 - a * b, a + b, -0.5]), 1.0))
        .chain(std::iter::once((ChebSeries::from_coeffs(vec![0.5, 0.0, -0.5]), 0.0)))
        .collect();
    for (gi, (g, offset)) in groups.iter().enumerate() {
        let b0 = gi * blocks_per_group;
        if b0 >= cert.gram_blocks.len() {
            break;
        }
        let mut recon = gram_to_series(&cert.gram_blocks[b0], &one);
        if has_s1 {
            recon = recon.add(&gram_to_series(&cert.gram_blocks[b0 + 1], g));
        }
        // p = offset + s0 + g s1 (offset 1 on target intervals)
        for t in 0..=d {
            let want = cert.coeffs.coefficient(t) - if t == 0 { *offset } else { 0.0 };
            worst = worst.max((recon.coefficient(t) - want).abs());
        }
    }
    worst
}

fn gram_to_series(q: &DMat, g: &ChebSeries) -> ChebSeries {
    let n = q.rows;
    let mut acc = ChebSeries::zero();
    for i in 0..n {
        for j in i..n {
            let w = if i == j { q.at(i, i) } else { 2.0 * q.at(i, j) };
            if w == 0.0 {
                continue;
            }
            let prod = ChebSeries::basis(i)
                .mul(&ChebSeries::basis(j))
                .and_then(|p| p.mul(g))
                .expect("reconstruction degrees bounded");
            acc = acc.add(&prod.scaled(w));
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// on-disk certificate cache

/// Serialized certificate document. Coefficients survive a round trip
/// bit-exactly because the JSON writer emits shortest-roundtrip decimals.
#[derive(Serialize, Deserialize)]
struct CertDoc {
    target: Vec<(f64, f64)>,
    degree: usize,
    requested_degree: usize,
    coeffs: Vec<f64>,
    objective: f64,
    residuals: CertResiduals,
    solver_cfg_hash: String,
    created_at: u64,
}

/// Disk cache holding one JSON document per certificate, keyed by a
/// content hash of (target, degree, solver configuration).
pub struct CertificateCache {
    dir: PathBuf,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn solver_cfg_hash(cfg: &SolverConfig) -> String {
    let mut bytes = Vec::new();
    for v in [cfg.tol_gap, cfg.tol_feas, cfg.step_frac, cfg.sigma, cfg.init_scale] {
        bytes.extend_from_slice(&v.to_bits().to_le_bytes());
    }
    bytes.extend_from_slice(&(cfg.max_iter as u64).to_le_bytes());
    bytes.push(cfg.predictor_corrector as u8);
    format!("{:016x}", fnv1a64(&bytes))
}

impl CertificateCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(CertificateCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Content key of (target, degree, solver cfg).
    pub fn key(target: &IntervalSet, degree: usize, cfg: &SolverConfig) -> String {
        let mut bytes = Vec::new();
        for &(a, b) in target.intervals() {
            bytes.extend_from_slice(&a.to_bits().to_le_bytes());
            bytes.extend_from_slice(&b.to_bits().to_le_bytes());
        }
        bytes.extend_from_slice(&(degree as u64).to_le_bytes());
        bytes.extend_from_slice(solver_cfg_hash(cfg).as_bytes());
        format!("{:016x}", fnv1a64(&bytes))
    }

    fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Result<Option<IndicatorCertificate>> {
        let path = self.path_for(key);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)?;
        let doc: CertDoc = serde_json::from_str(&text)?;
        Ok(Some(IndicatorCertificate {
            target: IntervalSet::new(doc.target)?,
            degree: doc.degree,
            requested_degree: doc.requested_degree,
            coeffs: ChebSeries::from_coeffs(doc.coeffs),
            gram_blocks: Vec::new(),
            objective_value: doc.objective,
            solver_status: "cached".into(),
            residuals: doc.residuals,
        }))
    }

    /// Atomic write: temp file then rename.
    pub fn store(&self, cert: &IndicatorCertificate, cfg: &SolverConfig) -> Result<String> {
        let key = Self::key(&cert.target, cert.degree, cfg);
        let doc = CertDoc {
            target: cert.target.intervals().to_vec(),
            degree: cert.degree,
            requested_degree: cert.requested_degree,
            coeffs: cert.coeffs.coeffs.clone(),
            objective: cert.objective_value,
            residuals: cert.residuals.clone(),
            solver_cfg_hash: solver_cfg_hash(cfg),
            created_at: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        };
        let tmp = self.dir.join(format!(".{key}.tmp"));
        std::fs::write(&tmp, serde_json::to_string_pretty(&doc)?)?;
        std::fs::rename(&tmp, self.path_for(&key))?;
        Ok(key)
    }

    /// Load the certificate if cached, otherwise solve and store it.
    /// Returns the certificate, its cache key, and whether a solve ran.
    pub fn fetch_or_solve(
        &self,
        target: &IntervalSet,
        d: usize,
        cfg: &SolverConfig,
    ) -> Result<(IndicatorCertificate, String, bool)> {
        let even_d = d + d % 2;
        let key = Self::key(target, even_d, cfg);
        if let Some(cert) = self.load(&key)? {
            return Ok((cert, key, false));
        }
        let cert = approximate_indicator(target, d, cfg)?;
        let key = self.store(&cert, cfg)?;
        Ok((cert, key, true))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_examples() {
        let k = IntervalSet::interval(-0.4, 0.0).unwrap();
        let kbar = k.complement();
        assert_eq!(kbar.intervals(), &[(-1.0, -0.4), (0.0, 1.0)]);

        assert!(IntervalSet::full().complement().is_empty());

        let two = IntervalSet::new(vec![(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        assert_eq!(two.complement().intervals(), &[(-0.5, 0.5)]);

        assert_eq!(IntervalSet::empty().complement(), IntervalSet::full());
    }

    #[test]
    fn interval_validation() {
        assert!(IntervalSet::interval(-1.2, 0.0).is_err());
        assert!(IntervalSet::interval(0.3, 0.1).is_err());
        assert!(IntervalSet::new(vec![(-0.5, 0.1), (0.0, 0.5)]).is_err());
    }

    #[test]
    fn full_box_indicator_is_one() {
        let cert =
            approximate_indicator(&IntervalSet::full(), 8, &SolverConfig::default()).unwrap();
        assert!((cert.objective_value - 2.0).abs() < 1e-5);
        assert!((cert.coeffs.coefficient(0) - 1.0).abs() < 1e-4);
        for k in 1..=8 {
            assert!(cert.coeffs.coefficient(k).abs() < 1e-4, "c_{k}");
        }
        let report = validate_certificate(&cert, 2000);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn empty_target_is_zero() {
        let cert =
            approximate_indicator(&IntervalSet::empty(), 12, &SolverConfig::default()).unwrap();
        assert_eq!(cert.coeffs.degree(), 0);
        assert_eq!(cert.coeffs.eval(0.3), 0.0);
        assert!(validate_certificate(&cert, 1000).pass);
    }

    #[test]
    fn odd_degree_rounds_up() {
        let cert = approximate_indicator(
            &IntervalSet::interval(-0.4, 0.0).unwrap(),
            7,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(cert.degree, 8);
        assert_eq!(cert.requested_degree, 7);
    }

    #[test]
    fn indicator_dominates_and_tightens() {
        let target = IntervalSet::interval(-0.4, 0.0).unwrap();
        let cfg = SolverConfig::default();
        let mut last_objective = f64::INFINITY;
        for d in [8usize, 16, 24] {
            let cert = approximate_indicator(&target, d, &cfg).unwrap();
            let report = validate_certificate(&cert, 4000);
            assert!(report.pass, "d={d}: {report:?}");
            // objective decreasing in d (feasible sets nest)
            assert!(cert.objective_value <= last_objective + 1e-8, "d={d}");
            last_objective = cert.objective_value;
            // objective consistency with the coefficient integral
            assert!((cert.coeffs.integral() - cert.objective_value).abs() < 1e-7);
            // strictly between |K| and the box measure
            assert!(cert.objective_value > 0.4 && cert.objective_value < 2.0);
            // indicator domination on a fine grid
            for k in 0..2000 {
                let z = -1.0 + 2.0 * k as f64 / 1999.0;
                let want = if target.contains(z) { 1.0 } else { 0.0 };
                assert!(cert.coeffs.eval(z) >= want - TOL_FEAS, "z={z}");
            }
        }
    }

    #[test]
    fn complement_certificate_solves() {
        let kbar = IntervalSet::interval(-0.4, 0.0).unwrap().complement();
        let cert = approximate_indicator(&kbar, 16, &SolverConfig::default()).unwrap();
        let report = validate_certificate(&cert, 4000);
        assert!(report.pass, "{report:?}");
        // two interval pairs plus the global pair
        assert_eq!(cert.gram_blocks.len(), 6);
    }

    #[test]
    fn corrupted_certificate_fails_audit() {
        let target = IntervalSet::interval(-0.4, 0.0).unwrap();
        let mut cert =
            approximate_indicator(&target, 12, &SolverConfig::default()).unwrap();
        assert!(validate_certificate(&cert, 2000).pass);
        // flip the sign of one coefficient
        cert.coeffs.coeffs[3] = -cert.coeffs.coeffs[3];
        let report = validate_certificate(&cert, 2000);
        assert!(!report.pass);
        assert!(report.grid_violation > TOL_FEAS);
    }

    #[test]
    fn cache_roundtrip_bit_exact() {
        let dir = std::env::temp_dir().join(format!("chebrisk-cache-test-{}", std::process::id()));
        let cache = CertificateCache::new(&dir).unwrap();
        let target = IntervalSet::interval(-0.1, 0.2).unwrap();
        let cfg = SolverConfig::default();
        let (cert, key, solved) = cache.fetch_or_solve(&target, 10, &cfg).unwrap();
        assert!(solved);
        let (cached, key2, solved2) = cache.fetch_or_solve(&target, 10, &cfg).unwrap();
        assert!(!solved2);
        assert_eq!(key, key2);
        assert_eq!(cert.coeffs.coeffs.len(), cached.coeffs.coeffs.len());
        for (a, b) in cert.coeffs.coeffs.iter().zip(&cached.coeffs.coeffs) {
            assert_eq!(a.to_bits(), b.to_bits(), "coefficients must reload bit-exactly");
        }
        std::fs::remove_dir_all(&dir).ok();
    }
}
