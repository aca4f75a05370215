//! Shared fixtures for the pipeline benchmarks.

use chebrisk_core::moments::Marginal;
use chebrisk_core::risk::{Constraint, RiskProblem};
use chebrisk_core::MultiPoly;

/// The moving-hole problem: z = 0.5(x - q), target [-0.4, 0].
pub fn moving_hole(degree: usize) -> RiskProblem {
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
