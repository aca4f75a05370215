//! Property tests for the polynomial layer.

use chebrisk_core::poly::{certified_box_range, ChebSeries, MultiPoly, PolyBudget};
use proptest::prelude::*;

fn cheb_series(max_degree: usize) -> impl Strategy<Value = ChebSeries> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_degree + 1).prop_map(ChebSeries::from_coeffs)
}

fn small_poly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(
        (prop::collection::vec(0u32..4, nvars), -1.0f64..1.0),
        1..7,
    )
    .prop_map(move |terms| MultiPoly::from_terms(nvars, terms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Chebyshev products evaluate like pointwise products.
    #[test]
    fn cheb_mul_matches_pointwise(a in cheb_series(12), b in cheb_series(12)) {
        let p = a.mul(&b).unwrap();
        for i in 0..100 {
            let z = -1.0 + 2.0 * i as f64 / 99.0;
            let want = a.eval(z) * b.eval(z);
            prop_assert!((p.eval(z) - want).abs() < 1e-9, "z={z}");
        }
    }

    /// Basis conversion round-trips through degree 30.
    #[test]
    fn basis_roundtrip_identity(coeffs in prop::collection::vec(-2.0f64..2.0, 1..=31)) {
        let back = ChebSeries::from_standard(&coeffs).to_standard();
        for (i, c) in coeffs.iter().enumerate() {
            prop_assert!((back[i] - c).abs() < 1e-9, "i={i}: {} vs {c}", back[i]);
        }
    }

    /// The closed-form integral matches composite-Simpson quadrature. The
    /// grid must be fine: endpoint derivatives of T_k grow like k^8.
    #[test]
    fn integral_matches_quadrature(a in cheb_series(16)) {
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mut q = a.eval(-1.0) + a.eval(1.0);
        for i in 1..n {
            let z = -1.0 + i as f64 * h;
            q += if i % 2 == 1 { 4.0 * a.eval(z) } else { 2.0 * a.eval(z) };
        }
        q *= h / 3.0;
        prop_assert!((a.integral() - q).abs() < 1e-9);
    }

    /// Powers evaluate like repeated products.
    #[test]
    fn pow_matches_eval(p in small_poly(2), k in 0usize..5) {
        let budget = PolyBudget::default();
        let powered = p.pow(k, &budget).unwrap();
        for pt in [[0.3, -0.7], [0.95, 0.2], [-0.5, -0.5], [0.0, 1.0]] {
            let want = p.eval(&pt).powi(k as i32);
            let got = powered.eval(&pt);
            let scale = want.abs().max(1.0);
            prop_assert!((got - want).abs() / scale < 1e-9);
        }
    }

    /// The certified range encloses values at random points.
    #[test]
    fn range_encloses_samples(p in small_poly(3), seed in 0u64..1000) {
        let (lo, hi, _) = certified_box_range(&p);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..500 {
            let pt = [next(), next(), next()];
            let v = p.eval(&pt);
            prop_assert!(v >= lo - 1e-10 && v <= hi + 1e-10, "{v} outside [{lo}, {hi}]");
        }
    }
}

/// Dense random-grid check that the box bound dominates the sup-norm.
#[test]
fn box_bound_dominates_dense_random_grid() {
    let polys = [
        MultiPoly::from_terms(2, vec![(vec![2, 0], 2.0), (vec![0, 0], -1.0)]),
        MultiPoly::from_terms(2, vec![(vec![1, 1], 1.0)]),
        MultiPoly::from_terms(
            2,
            vec![(vec![3, 0], 0.8), (vec![1, 2], -1.2), (vec![0, 1], 0.4), (vec![0, 0], -0.1)],
        ),
        MultiPoly::from_terms(
            3,
            vec![(vec![4, 0, 0], -1.0), (vec![2, 0, 0], 0.5), (vec![0, 2, 0], -0.5), (vec![0, 0, 1], 0.1)],
        ),
    ];
    let mut state = 0x1234_5678_9abc_def0u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    for p in &polys {
        let bound = chebrisk_core::box_bound(p);
        let mut max = 0.0f64;
        let mut pt = vec![0.0; p.nvars()];
        for _ in 0..1_000_000 {
            for c in pt.iter_mut() {
                *c = next();
            }
            max = max.max(p.eval(&pt).abs());
        }
        assert!(bound >= max - 1e-12, "bound {bound} below observed max {max}");
    }
}
