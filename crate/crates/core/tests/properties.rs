use std::f64::consts::PI;

use proptest::prelude::*;

use warplab::geometry::{FiberDescriptor, WarpedProductSpace};
use warplab::integral::theorem1_sides;
use warplab::intersection::random_curves;
use warplab::report::{CheckRecord, Provenance, RefinementStep, VerificationReport};
use warplab::scenario::Suite;
use warplab::spectral::DiscreteLaplacian;
use warplab::warp::{catalog, Domain1D, WarpingFunction};

/// `a + b cos(k t + c)` with `a > |b|`, periodic on `[0, 2π)`.
fn trig_warp() -> impl Strategy<Value = (WarpingFunction, f64, f64, u32)> {
    (1.5f64..4.0, -1.0f64..1.0, 1u32..5, 0.0f64..6.0).prop_map(|(a, b, k, c)| {
        let wf = WarpingFunction::parse(&format!("{a} + {b} * cos({k} * t + {c})"), Domain1D::circle(2.0 * PI).unwrap())
            .unwrap();
        (wf, a, b, k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn warps_are_periodic((wf, ..) in trig_warp(), t in -20.0f64..20.0) {
        let (v0, d0, s0) = wf.eval(t).unwrap();
        let (v1, d1, s1) = wf.eval(t + 2.0 * PI).unwrap();
        prop_assert!((v0 - v1).abs() <= 1e-12 && (d0 - d1).abs() <= 1e-12 && (s0 - s1).abs() <= 1e-12);
    }

    #[test]
    fn log_warp_identity_holds((wf, ..) in trig_warp(), t in 0.0f64..6.28, q in 1usize..5) {
        let space = WarpedProductSpace::over_line(wf, FiberDescriptor::sphere(q).unwrap());
        prop_assert!(space.log_warp_identity_residual(&[t]).unwrap() <= 1e-10);
    }

    #[test]
    fn integral_sides_agree_and_are_nonnegative((wf, a, b, k) in trig_warp(), q in 2usize..4) {
        let space = WarpedProductSpace::over_line(wf, FiberDescriptor::sphere(q).unwrap());
        let r = theorem1_sides(&space, 64).unwrap();
        prop_assert!(r.rhs >= -1e-14);
        prop_assert!(r.relative_residual() <= 1e-8);
        // q = 2: 2 Vol(S²) ∫ f'² = 8π · π b² k²
        if q == 2 {
            let exact = 8.0 * PI * PI * b * b * (k * k) as f64;
            prop_assert!((r.rhs - exact).abs() <= 1e-9 * exact.max(1.0), "{} vs {exact} (a = {a})", r.rhs);
        }
    }

    #[test]
    fn height_identity_converges_at_second_order(seed in 0u64..1000) {
        let curve = random_curves(&catalog::two_plus_cos().unwrap(), 1, seed).unwrap().remove(0);
        let errs: Vec<f64> = [5e-3, 2.5e-3, 1.25e-3]
            .iter()
            .map(|h| curve.height_laplacian_check(*h, 12).unwrap().max_residual)
            .collect();
        for w in errs.windows(2) {
            let o = (w[0] / w[1]).log2();
            prop_assert!((o - 2.0).abs() <= 0.3, "order {o}");
        }
    }

    #[test]
    fn curve_laplacians_are_symmetric(edges in prop::collection::vec(0.05f64..2.0, 3..40)) {
        let l = DiscreteLaplacian::closed_curve(&edges).unwrap();
        prop_assert!(l.asymmetry() <= 1e-12 && l.max_row_sum() <= 1e-10);
        let ones = vec![1.0; edges.len()];
        prop_assert!(l.energy(&ones).abs() <= 1e-10);
    }

    #[test]
    fn reports_round_trip(vals in prop::collection::vec(-1e6f64..1e6, 4), seed in any::<u64>(), hist in prop::collection::vec(1e-9f64..1.0, 0..5)) {
        let c = CheckRecord::new("c", "anchor", vals[0], vals[1], vals[2].abs(), vals[3].abs())
            .history(hist.iter().enumerate().map(|(i, v)| RefinementStep { resolution: (8 << i) as f64, value: *v }).collect());
        let r = VerificationReport::new("s".into(), Suite::All, vec![c], Provenance::new("{}", seed));
        let back = VerificationReport::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json(), r.to_json());
    }
}
