//! Certified upper and lower bounds on the probability that an uncertain
//! state lies in a polynomial level-set region.
//!
//! The offline step solves small univariate sum-of-squares programs to get
//! Chebyshev polynomial over-approximations of interval indicator
//! functions; the online step contracts those coefficients against moment
//! vectors of the uncertainty distributions, so evaluating a bound for new
//! moments is a single dot product.

pub mod error;
pub mod indicator;
#[allow(clippy::needless_range_loop)]
pub mod linalg;
pub mod mc;
pub mod moments;
pub mod poly;
pub mod propagate;
pub mod quadrature;
pub mod risk;
#[allow(clippy::needless_range_loop)]
pub mod sdp;

pub use error::{Error, Result};
pub use indicator::{
    approximate_indicator, validate_certificate, CertificateCache, IndicatorCertificate,
    IntervalSet,
};
pub use mc::{mc_risk, McEstimate, SampleConfig};
pub use moments::Marginal;
pub use poly::{box_bound, rescale_constraint, ChebSeries, MultiPoly, PolyBudget};
pub use propagate::{
    mixed_cheb_moments, moment_validity_degree, z_moments_cheb, z_moments_standard, MomentVector,
};
pub use risk::{estimate, Constraint, EstimateConfig, RiskBounds, RiskProblem};
pub use sdp::{SdpProblem, SdpSolution, SolverConfig};
