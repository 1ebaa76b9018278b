//! Property tests for the structural invariants: Weyl's inequality, scale
//! invariance, interpolation exactness, serialization round trips.

use layerpot::analysis::zeta_bound;
use layerpot::geometry::Curve2D;
use layerpot::interp::TrigInterp;
use layerpot::io::{read_matrix_binary, write_matrix_binary};
use layerpot::operators::assemble_dlp_2d;
use layerpot::spectral::eigenvalues_only;
use ndarray::Array2;
use ndarray_linalg::{EigVals, SVD};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// Weyl: sum |lambda|^r <= sum alpha^r on arbitrary square matrices.
    #[test]
    fn weyl_inequality_on_random_matrices(entries in prop::collection::vec(-1.0f64..1.0, 64)) {
        let a = Array2::from_shape_vec((8, 8), entries).unwrap();
        let eigs = a.eigvals().unwrap();
        let (_, sv, _) = a.svd(false, false).unwrap();
        for r in [2.0, 4.0] {
            let lhs: f64 = eigs.iter().map(|z| z.norm().powf(r)).sum();
            let rhs: f64 = sv.iter().map(|s| s.powf(r)).sum();
            prop_assert!(lhs <= rhs * (1.0 + 1e-10), "r={r}: {lhs} > {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// 2D eigenvalues are invariant under rescaling the curve.
    #[test]
    fn eigenvalues_are_scale_invariant(scale in 0.3f64..3.0) {
        let base = Curve2D::ellipse(2.0, 0.5).unwrap();
        let scaled = base.scaled(scale).unwrap();
        let e1 = eigenvalues_only(&assemble_dlp_2d(&base, 64).unwrap()).unwrap();
        let e2 = eigenvalues_only(&assemble_dlp_2d(&scaled, 64).unwrap()).unwrap();
        let key = |z: &num_complex::Complex64| (z.norm(), z.re, z.im);
        let mut m1: Vec<_> = e1.iter().map(key).collect();
        let mut m2: Vec<_> = e2.iter().map(key).collect();
        let cmp = |a: &(f64, f64, f64), b: &(f64, f64, f64)| a.partial_cmp(b).unwrap();
        m1.sort_by(cmp);
        m2.sort_by(cmp);
        for (a, b) in m1.iter().zip(&m2) {
            prop_assert!((a.0 - b.0).abs() < 1e-10, "{a:?} vs {b:?}");
        }
    }

    /// Binary matrix files round-trip bit for bit.
    #[test]
    fn matrix_binary_round_trip(entries in prop::collection::vec(-1e6f64..1e6, 16)) {
        let a = Array2::from_shape_vec((4, 4), entries).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        write_matrix_binary(&path, &a).unwrap();
        prop_assert_eq!(read_matrix_binary(&path).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// The trigonometric interpolant reproduces its samples exactly.
    #[test]
    fn interpolant_hits_samples(samples in prop::collection::vec(-10.0f64..10.0, 16)) {
        let interp = TrigInterp::new(&samples);
        for (j, &s) in samples.iter().enumerate() {
            let t = 2.0 * std::f64::consts::PI * j as f64 / samples.len() as f64;
            prop_assert!((interp.eval(t) - s).abs() < 1e-10);
        }
    }

    /// The odd-zeta lower bound decreases in p and stays above 1.
    #[test]
    fn zeta_bound_monotone(p1 in 1.1f64..4.0, dp in 0.1f64..2.0) {
        let v1 = zeta_bound(p1).unwrap();
        let v2 = zeta_bound(p1 + dp).unwrap();
        prop_assert!(v1 > v2);
        prop_assert!(v2 > 1.0);
    }
}
