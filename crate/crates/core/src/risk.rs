//! End-to-end assembly: rescale constraints, fetch or solve indicator
//! certificates, propagate moments, and contract the two against each
//! other to produce certified risk bounds.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::indicator::{CertificateCache, IndicatorCertificate, IntervalSet};
use crate::moments::Marginal;
use crate::poly::{rescale_constraint, MultiPoly, RescaleInfo};
use crate::propagate::{
    mixed_cheb_moments, moment_validity_degree, z_moments_cheb, MixedChebMoments, MomentVector,
};
use crate::sdp::SolverConfig;

/// One level-set constraint `lower <= poly(x, q) <= upper`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub poly: MultiPoly,
    pub lower: f64,
    pub upper: f64,
}

/// A risk estimation instance: the unsafe region is the set where every
/// constraint holds, and the margins give the laws of all variables.
#[derive(Clone, Debug)]
pub struct RiskProblem {
    pub constraints: Vec<Constraint>,
    pub margins: Vec<Marginal>,
    pub degree: usize,
}

impl RiskProblem {
    // the negated comparison also rejects NaN thresholds
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Err(Error::InvalidProblem("need at least one constraint".into()));
        }
        for c in &self.constraints {
            if c.poly.nvars() != self.margins.len() {
                return Err(Error::VarCountMismatch {
                    left: c.poly.nvars(),
                    right: self.margins.len(),
                });
            }
            if !(c.lower <= c.upper) {
                return Err(Error::InvalidProblem(format!(
                    "thresholds must satisfy lower <= upper, got [{}, {}]",
                    c.lower, c.upper
                )));
            }
        }
        for m in &self.margins {
            m.validate()?;
        }
        Ok(())
    }
}

/// How the pipeline picks the certificate degree.
#[derive(Clone, Debug)]
pub enum DegreeSpec {
    Fixed(usize),
    /// Increase in steps of ten until the moment validity degree stops
    /// following or the wall-clock budget binds.
    Auto { max: usize, budget_seconds: f64 },
}

#[derive(Clone, Debug, Default)]
pub struct EstimateConfig {
    pub solver: SolverConfig,
    pub degree: Option<DegreeSpec>,
}

/// Certified bracket on the risk, with provenance diagnostics.
#[derive(Clone, Debug)]
pub struct RiskBounds {
    pub lower: f64,
    pub upper: f64,
    pub raw_lower: f64,
    pub raw_upper: f64,
    pub degree_requested: usize,
    pub degree_used: usize,
    pub validity_degree: usize,
    pub certificate_keys: Vec<String>,
    pub offline_seconds: f64,
    pub certificate_seconds: f64,
    pub moment_seconds: f64,
    pub online_seconds: f64,
    pub clamped: bool,
    /// True for multi-constraint problems, where only the upper bound has
    /// a certificate and the lower bound is reported as zero.
    pub lower_is_trivial: bool,
    pub rescales: Vec<RescaleInfo>,
}

/// Upper bound from a target certificate and a Chebyshev moment vector:
/// the dot product of coefficients and moments. Returns (raw, clamped).
pub fn upper_bound_single(
    cert: &IndicatorCertificate,
    mz: &MomentVector,
) -> Result<(f64, f64)> {
    contract(cert, mz).map(|raw| (raw, raw.clamp(0.0, 1.0)))
}

/// Lower bound from a complement-set certificate: `1 - sum c m`.
pub fn lower_bound_single(
    cert_complement: &IndicatorCertificate,
    mz: &MomentVector,
) -> Result<(f64, f64)> {
    contract(cert_complement, mz).map(|s| {
        let raw = 1.0 - s;
        (raw, raw.clamp(0.0, 1.0))
    })
}

fn contract(cert: &IndicatorCertificate, mz: &MomentVector) -> Result<f64> {
    let d = cert.coeffs.degree();
    if d > mz.degree() {
        return Err(Error::InsufficientMoments { available: mz.degree(), needed: d });
    }
    let valid = moment_validity_degree(mz);
    if valid < d {
        return Err(Error::MomentInstability { valid_degree: valid, requested: d });
    }
    Ok((0..=d).map(|k| cert.coeffs.coefficient(k) * mz.values[k]).sum())
}

/// Multi-constraint upper bound: contract the tensor product of the
/// per-constraint certificates against the mixed Chebyshev moments.
pub fn upper_bound_multi(
    certs: &[IndicatorCertificate],
    mixed: &MixedChebMoments,
) -> Result<(f64, f64)> {
    assert_eq!(certs.len(), mixed.ell);
    for (j, cert) in certs.iter().enumerate() {
        if cert.coeffs.degree() > mixed.degrees[j] {
            return Err(Error::InsufficientMoments {
                available: mixed.degrees[j],
                needed: cert.coeffs.degree(),
            });
        }
    }
    let mut raw = 0.0;
    for (idx, m) in mixed.entries() {
        let mut c = 1.0;
        for (j, &i) in idx.0.iter().enumerate() {
            c *= certs[j].coeffs.coefficient(i as usize);
            if c == 0.0 {
                break;
            }
        }
        raw += c * m;
    }
    Ok((raw, raw.clamp(0.0, 1.0)))
}

/// Standardized form of a problem: variable supports mapped onto [-1, 1]
/// and constraints rescaled so every polynomial is bounded by one on the
/// box. The surrogate distribution is unchanged.
pub struct PreparedProblem {
    pub constraints: Vec<Constraint>,
    pub margins: Vec<Marginal>,
    pub rescales: Vec<RescaleInfo>,
}

pub fn prepare(problem: &RiskProblem) -> Result<PreparedProblem> {
    problem.validate()?;
    let mut centers = Vec::with_capacity(problem.margins.len());
    let mut halfwidths = Vec::with_capacity(problem.margins.len());
    let mut std_margins = Vec::with_capacity(problem.margins.len());
    for m in &problem.margins {
        let (std, c, r) = m.standardize();
        std_margins.push(std);
        centers.push(c);
        halfwidths.push(r);
    }
    let mut constraints = Vec::with_capacity(problem.constraints.len());
    let mut rescales = Vec::with_capacity(problem.constraints.len());
    for c in &problem.constraints {
        let standardized = c.poly.substitute_affine(&centers, &halfwidths);
        let (poly, lower, upper, info) = rescale_constraint(&standardized, c.lower, c.upper)
            .map_err(|e| e.in_stage("rescale"))?;
        constraints.push(Constraint { poly, lower, upper });
        rescales.push(info);
    }
    Ok(PreparedProblem { constraints, margins: std_margins, rescales })
}

/// Full pipeline: prepare, pick the degree, fetch or solve certificates,
/// propagate moments, and contract.
pub fn estimate(
    problem: &RiskProblem,
    cache: &CertificateCache,
    cfg: &EstimateConfig,
) -> Result<RiskBounds> {
    let prepared = prepare(problem)?;
    let requested = match &cfg.degree {
        Some(DegreeSpec::Fixed(d)) => *d,
        Some(DegreeSpec::Auto { .. }) | None => problem.degree,
    };
    if prepared.constraints.len() == 1 {
        estimate_single(problem, &prepared, requested, cache, cfg)
    } else {
        estimate_multi(&prepared, requested, cache, cfg)
    }
}

fn pick_degree_auto(
    poly: &MultiPoly,
    margins: &[Marginal],
    max: usize,
    budget_seconds: f64,
) -> Result<(usize, MomentVector, f64)> {
    let start = Instant::now();
    let mut best: Option<(usize, MomentVector)> = None;
    let mut d = 10usize.min(max.max(2));
    loop {
        let mz = z_moments_cheb(poly, margins, d).map_err(|e| e.in_stage("moments"))?;
        let valid = moment_validity_degree(&mz);
        if valid < d {
            break;
        }
        best = Some((d, mz));
        if d >= max || start.elapsed().as_secs_f64() > budget_seconds {
            break;
        }
        d = (d + 10).min(max);
    }
    let (d, mz) = best.ok_or(Error::MomentInstability { valid_degree: 0, requested: 10 })?;
    Ok((d, mz, start.elapsed().as_secs_f64()))
}

fn estimate_single(
    problem: &RiskProblem,
    prepared: &PreparedProblem,
    requested: usize,
    cache: &CertificateCache,
    cfg: &EstimateConfig,
) -> Result<RiskBounds> {
    let constraint = &prepared.constraints[0];
    // moments first: the usable degree is capped by moment validity
    let (degree_used, mz, moment_seconds) = match &cfg.degree {
        Some(DegreeSpec::Auto { max, budget_seconds }) => {
            pick_degree_auto(&constraint.poly, &prepared.margins, *max, *budget_seconds)?
        }
        _ => {
            let t = Instant::now();
            let mz = z_moments_cheb(&constraint.poly, &prepared.margins, requested)
                .map_err(|e| e.in_stage("moments"))?;
            let valid = moment_validity_degree(&mz);
            let d_used = requested.min(valid);
            let mut mz = mz;
            mz.values.truncate(d_used + 1);
            (d_used, mz, t.elapsed().as_secs_f64())
        }
    };
    let validity_degree = moment_validity_degree(&mz);

    let target = IntervalSet::interval(constraint.lower, constraint.upper)
        .map_err(|e| e.in_stage("target"))?;
    let complement = target.complement();
    let cert_clock = Instant::now();
    // the certificate degree must not exceed the moment length, so round
    // down to even rather than up
    let cert_degree = degree_used - degree_used % 2;
    let (cert_k, key_k, _) = cache
        .fetch_or_solve(&target, cert_degree, &cfg.solver)
        .map_err(|e| e.in_stage("certificate"))?;
    let (cert_kbar, key_kbar, _) = cache
        .fetch_or_solve(&complement, cert_degree, &cfg.solver)
        .map_err(|e| e.in_stage("certificate"))?;
    let certificate_seconds = cert_clock.elapsed().as_secs_f64();

    let online_clock = Instant::now();
    let (raw_upper, upper) = upper_bound_single(&cert_k, &mz).map_err(|e| e.in_stage("online"))?;
    let (raw_lower, lower) =
        lower_bound_single(&cert_kbar, &mz).map_err(|e| e.in_stage("online"))?;
    let online_seconds = online_clock.elapsed().as_secs_f64();

    Ok(RiskBounds {
        lower: lower.min(upper),
        upper,
        raw_lower,
        raw_upper,
        degree_requested: if requested == 0 { problem.degree } else { requested },
        degree_used: cert_degree,
        validity_degree,
        certificate_keys: vec![key_k, key_kbar],
        offline_seconds: certificate_seconds + moment_seconds,
        certificate_seconds,
        moment_seconds,
        online_seconds,
        clamped: raw_upper != upper || raw_lower != lower,
        lower_is_trivial: false,
        rescales: prepared.rescales.clone(),
    })
}

fn estimate_multi(
    prepared: &PreparedProblem,
    requested: usize,
    cache: &CertificateCache,
    cfg: &EstimateConfig,
) -> Result<RiskBounds> {
    let ell = prepared.constraints.len();
    let degrees = vec![requested; ell];
    let moment_clock = Instant::now();
    let polys: Vec<MultiPoly> = prepared.constraints.iter().map(|c| c.poly.clone()).collect();
    let mixed = mixed_cheb_moments(&polys, &prepared.margins, &degrees)
        .map_err(|e| e.in_stage("moments"))?;
    let moment_seconds = moment_clock.elapsed().as_secs_f64();

    let cert_clock = Instant::now();
    let mut certs = Vec::with_capacity(ell);
    let mut keys = Vec::with_capacity(ell);
    for c in &prepared.constraints {
        let target = IntervalSet::interval(c.lower, c.upper).map_err(|e| e.in_stage("target"))?;
        let d_even = requested - requested % 2;
        let (cert, key, _) = cache
            .fetch_or_solve(&target, d_even, &cfg.solver)
            .map_err(|e| e.in_stage("certificate"))?;
        certs.push(cert);
        keys.push(key);
    }
    let certificate_seconds = cert_clock.elapsed().as_secs_f64();

    let online_clock = Instant::now();
    let (raw_upper, upper) =
        upper_bound_multi(&certs, &mixed).map_err(|e| e.in_stage("online"))?;
    let online_seconds = online_clock.elapsed().as_secs_f64();

    Ok(RiskBounds {
        lower: 0.0,
        upper,
        raw_lower: 0.0,
        raw_upper,
        degree_requested: requested,
        degree_used: requested - requested % 2,
        validity_degree: requested,
        certificate_keys: keys,
        offline_seconds: certificate_seconds + moment_seconds,
        certificate_seconds,
        moment_seconds,
        online_seconds,
        clamped: raw_upper != upper,
        lower_is_trivial: true,
        rescales: prepared.rescales.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagate::Basis;

    fn temp_cache(tag: &str) -> CertificateCache {
        let dir = std::env::temp_dir().join(format!("chebrisk-risk-{tag}-{}", std::process::id()));
        std::fs::remove_dir_all(&dir).ok();
        CertificateCache::new(dir).unwrap()
    }

    #[test]
    fn full_box_certificate_gives_unit_bounds() {
        // p identically small, K = [-1, 1]: every sample is a member
        let cache = temp_cache("fullbox");
        let problem = RiskProblem {
            constraints: vec![Constraint {
                poly: MultiPoly::from_terms(1, vec![(vec![1], 0.5)]),
                lower: -1.0,
                upper: 1.0,
            }],
            margins: vec![Marginal::uniform(-0.5, 0.5)],
            degree: 8,
        };
        let bounds = estimate(&problem, &cache, &EstimateConfig::default()).unwrap();
        assert!((bounds.upper - 1.0).abs() < 1e-4, "{bounds:?}");
        assert!((bounds.lower - 1.0).abs() < 1e-4, "{bounds:?}");
        std::fs::remove_dir_all(cache.dir()).ok();
    }

    #[test]
    fn point_mass_inside_target_dominates() {
        // moments of a point mass at z*: m_{T_k} = T_k(z*); the upper bound
        // equals the certificate evaluated there, which dominates 1
        let cache = temp_cache("point");
        let target = IntervalSet::interval(-0.4, 0.0).unwrap();
        let cfg = SolverConfig::default();
        let (cert, _, _) = cache.fetch_or_solve(&target, 12, &cfg).unwrap();
        let z_star = -0.2;
        let values: Vec<f64> = Marginal::point(z_star).cheb_moments(12).unwrap();
        let mz = MomentVector { values, basis: Basis::Chebyshev };
        let (raw, _) = upper_bound_single(&cert, &mz).unwrap();
        assert!(raw >= 1.0 - 1e-6);
        assert!((raw - cert.coeffs.eval(z_star)).abs() < 1e-10);
        std::fs::remove_dir_all(cache.dir()).ok();
    }

    #[test]
    fn illustrative_bracket_at_moderate_degree() {
        let sq2 = 2.0f64.sqrt();
        let cache = temp_cache("illus");
        let problem = RiskProblem {
            constraints: vec![Constraint {
                poly: MultiPoly::from_terms(2, vec![(vec![1, 0], 0.5), (vec![0, 1], -0.5)]),
                lower: -0.4,
                upper: 0.0,
            }],
            margins: vec![
                Marginal::uniform(-0.5, 0.5),
                Marginal::beta(3.0 - sq2, 3.0 + sq2, 0.0, 1.0),
            ],
            degree: 20,
        };
        let bounds = estimate(&problem, &cache, &EstimateConfig::default()).unwrap();
        // reference values at degree 20
        assert!((bounds.upper - 0.92).abs() < 0.02, "{}", bounds.upper);
        assert!((bounds.lower - 0.401).abs() < 0.02, "{}", bounds.lower);
        assert!(bounds.lower <= 0.7 && 0.7 <= bounds.upper);
        assert_eq!(bounds.degree_used, 20);
        assert_eq!(bounds.validity_degree, 20);
        assert!(!bounds.lower_is_trivial);
        // cached second run must reuse certificates
        let again = estimate(&problem, &cache, &EstimateConfig::default()).unwrap();
        assert_eq!(again.certificate_keys, bounds.certificate_keys);
        assert!((again.upper - bounds.upper).abs() < 1e-12);
        std::fs::remove_dir_all(cache.dir()).ok();
    }

    #[test]
    fn multi_constraint_upper_only() {
        let cache = temp_cache("multi");
        // P1 = x, K1 = [-0.5, 0.5]; P2 = q, K2 = [0, 1]
        // x ~ U(-0.5, 0.5) always inside K1; q = point(0.3) inside K2:
        // the true risk is 1 and the bound must not fall below it
        let problem = RiskProblem {
            constraints: vec![
                Constraint { poly: MultiPoly::var(2, 0), lower: -0.5, upper: 0.5 },
                Constraint { poly: MultiPoly::var(2, 1), lower: 0.0, upper: 1.0 },
            ],
            margins: vec![Marginal::uniform(-0.5, 0.5), Marginal::point(0.3)],
            degree: 12,
        };
        let bounds = estimate(&problem, &cache, &EstimateConfig::default()).unwrap();
        assert!(bounds.lower_is_trivial);
        assert_eq!(bounds.lower, 0.0);
        assert!(bounds.raw_upper >= 1.0 - 1e-6, "{}", bounds.raw_upper);
        std::fs::remove_dir_all(cache.dir()).ok();
    }

    #[test]
    fn auto_degree_stops_at_max() {
        let cache = temp_cache("auto");
        let problem = RiskProblem {
            constraints: vec![Constraint {
                poly: MultiPoly::from_terms(1, vec![(vec![1], 1.0)]),
                lower: -0.3,
                upper: 0.3,
            }],
            margins: vec![Marginal::uniform(-1.0, 1.0)],
            degree: 0,
        };
        let cfg = EstimateConfig {
            degree: Some(DegreeSpec::Auto { max: 30, budget_seconds: 30.0 }),
            ..Default::default()
        };
        let bounds = estimate(&problem, &cache, &cfg).unwrap();
        assert_eq!(bounds.degree_used, 30);
        // exact risk is 0.3; bracket holds
        assert!(bounds.lower <= 0.3 && 0.3 <= bounds.upper);
        std::fs::remove_dir_all(cache.dir()).ok();
    }
}
