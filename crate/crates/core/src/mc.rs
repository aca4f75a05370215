//! Monte Carlo ground-truth estimator for risk problems, used to validate
//! the certified bounds.
//!
//! Sampling runs in fixed-size chunks, each on its own counter-derived
//! ChaCha stream, so the estimate is identical no matter how chunks are
//! scheduled across threads.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::moments::Marginal;
use crate::risk::RiskProblem;

/// Samples per chunk; chunk index doubles as the stream id.
const CHUNK: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub n: usize,
    pub seed: u64,
    /// Confidence level for the Wilson interval.
    pub ci_level: f64,
    /// Worker threads; 0 picks a machine-dependent count. The estimate does
    /// not depend on this.
    pub threads: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { n: 1_000_000, seed: DEFAULT_SEED, ci_level: 0.99, threads: 0 }
    }
}

/// Seed used when the caller does not provide one; fixed so runs are
/// reproducible by default.
pub const DEFAULT_SEED: u64 = 20240819;

#[derive(Clone, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub hits: u64,
    pub n: usize,
    pub seed: u64,
}

/// Deterministic sampling state: one ChaCha stream plus a cached normal
/// draw for the polar method.
pub struct McRng {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl McRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        McRng { rng, spare_normal: None }
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal via the polar method.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }

    /// Gamma(shape, 1) via the squeeze method, boosted for shape < 1.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        if shape < 1.0 {
            let g = self.gamma(shape + 1.0);
            let u = self.uniform().max(f64::MIN_POSITIVE);
            return g * u.powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (3.0 * d.sqrt());
        loop {
            let x = self.normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform();
            if u < 1.0 - 0.0331 * x * x * x * x {
                return d * v;
            }
            if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}

/// One draw from the marginal's law. Uniforms use the inverse CDF; beta
/// uses the gamma-ratio construction.
pub fn sample(dist: &Marginal, rng: &mut McRng) -> Result<f64> {
    match dist {
        Marginal::Uniform { a, b } => Ok(a + (b - a) * rng.uniform()),
        Marginal::Beta { alpha, beta, a, b } => {
            let g1 = rng.gamma(*alpha);
            let g2 = rng.gamma(*beta);
            Ok(a + (b - a) * g1 / (g1 + g2))
        }
        Marginal::Point { v } => Ok(*v),
        Marginal::Moments { .. } => Err(Error::InvalidProblem(
            "cannot draw samples from a law specified only by its moments".into(),
        )),
    }
}

/// Membership fraction of the unsafe set, with a Wilson-interval
/// half-width. Membership is tested on the original, unscaled constraints
/// with closed inequalities.
pub fn mc_risk(problem: &RiskProblem, cfg: &SampleConfig) -> Result<McEstimate> {
    problem.validate()?;
    assert!(cfg.n >= 1);
    for m in &problem.margins {
        if matches!(m, Marginal::Moments { .. }) {
            return Err(Error::InvalidProblem(
                "Monte Carlo needs sampleable marginals, not moment tables".into(),
            ));
        }
    }
    let chunks = cfg.n.div_ceil(CHUNK);
    let workers = if cfg.threads > 0 {
        cfg.threads
    } else {
        std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(8)
    };
    let next = AtomicUsize::new(0);
    let total_hits: u64 = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..workers.max(1) {
            let next = &next;
            handles.push(scope.spawn(move || {
                let mut hits = 0u64;
                loop {
                    let c = next.fetch_add(1, Ordering::Relaxed);
                    if c >= chunks {
                        return hits;
                    }
                    let len = CHUNK.min(cfg.n - c * CHUNK);
                    hits += run_chunk(problem, cfg.seed, c as u64, len);
                }
            }));
        }
        handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
    });
    let estimate = total_hits as f64 / cfg.n as f64;
    let ci_halfwidth = wilson_halfwidth(estimate, cfg.n, cfg.ci_level);
    Ok(McEstimate { estimate, ci_halfwidth, hits: total_hits, n: cfg.n, seed: cfg.seed })
}

fn run_chunk(problem: &RiskProblem, seed: u64, stream: u64, len: usize) -> u64 {
    let mut rng = McRng::new(seed, stream);
    let nvars = problem.margins.len();
    let mut point = vec![0.0; nvars];
    let mut hits = 0u64;
    for _ in 0..len {
        for (v, m) in problem.margins.iter().enumerate() {
            point[v] = sample(m, &mut rng).expect("sampleable marginals checked upfront");
        }
        let inside = problem.constraints.iter().all(|c| {
            let val = c.poly.eval(&point);
            c.lower <= val && val <= c.upper
        });
        if inside {
            hits += 1;
        }
    }
    hits
}

/// Wilson score interval half-width at the given confidence level.
pub fn wilson_halfwidth(p_hat: f64, n: usize, ci_level: f64) -> f64 {
    let z = normal_quantile(0.5 + ci_level / 2.0);
    let nf = n as f64;
    let z2 = z * z;
    z / (1.0 + z2 / nf) * (p_hat * (1.0 - p_hat) / nf + z2 / (4.0 * nf * nf)).sqrt()
}

/// Inverse standard normal CDF (Acklam's rational approximation, absolute
/// error below 1.2e-9).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let p_low = 0.02425;
    if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}
