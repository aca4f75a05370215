//! Polynomial arithmetic: sparse multivariate polynomials in the monomial
//! basis, univariate Chebyshev series, per-variable basis conversion, and
//! the certified box bounds used to rescale constraints.

mod bound;
mod cheb;
mod multipoly;
mod tensor;

pub use bound::{box_bound, box_bound_detailed, certified_box_range, rescale_constraint, BoundMethod, RescaleInfo};
pub use cheb::{cheb_integral_weight, chebyshev_monomial_rows, ChebSeries, UNIVARIATE_DEGREE_CAP};
pub use multipoly::{Decomposition, GroupPoly, Monomial, MultiPoly, PolyBudget};
pub use tensor::TensorCheb;

/// Coefficients with absolute value below this are dropped after every
/// arithmetic operation to stop floating-point dust from inflating term
/// counts.
pub const COEFF_EPS: f64 = 1e-14;

/// Default total-degree cap for multivariate arithmetic.
pub const MULTIVARIATE_DEGREE_CAP: usize = 64;
