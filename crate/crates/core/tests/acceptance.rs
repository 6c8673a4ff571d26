//! Acceptance criteria, one test each. Every test writes a single
//! `criterion N: PASS|FAIL ...` line to stderr (bypassing output capture) and
//! then asserts.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::time::Instant;

use warplab::geometry::{FiberDescriptor, WarpedProductSpace};
use warplab::integral::{noncompact_window_integral, theorem1_sides};
use warplab::intersection::{
    decomposition_check, intersection_angle, make_rotation_hypersurface, parabolicity_witness, random_curves,
    slice_geodesity, witness_laplacian, Section,
};
use warplab::runner::{run_text, RunOptions};
use warplab::spectral::{
    gradient_identity_check, harmonic_extension, kappa_bound_check, lowest_eigenpairs, reilly_ledger, slice_spectrum,
    square_completion_check, square_vertex, theorem3_bound, theorem4_bound, BoundaryMode, ClosedCurveInSurface,
    CurveShape, DirichletProblem, DirichletSolution, DiscreteLaplacian, RotationalDomain, RotationalProfile,
    LANCZOS_SEED,
};
use warplab::warp::{catalog, schwarzschild_profile, SchwarzschildParams, WarpingFunction};

fn verdict(n: u32, ok: bool, detail: String) {
    let line = format!("criterion {n:>2}: {}  {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed: {detail}");
}

/// Composite Simpson rule, written out here so it shares nothing with the library.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn disc_solution(n: usize, k: u32) -> DirichletSolution {
    let domain = RotationalDomain::disc(1.0, n).unwrap();
    harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(k) }).unwrap()
}

fn schwarzschild() -> WarpingFunction {
    schwarzschild_profile(SchwarzschildParams { mass: 1.0, exponent: 2, r0: 2.0, tmax: 4.0, step: 1e-3 }).unwrap()
}

fn schwarzschild_sheet(n: usize) -> DirichletSolution {
    let profile = RotationalProfile::Warped { warp: schwarzschild(), a: 0.5, b: 3.0 };
    let domain = RotationalDomain::new(profile, n, n).unwrap();
    harmonic_extension(&DirichletProblem { domain, data: BoundaryMode::cosine(1) }).unwrap()
}

#[test]
fn criterion_01_integral_identity_two_plus_cos() {
    let start = Instant::now();
    let space = WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::sphere(2).unwrap());
    let r = theorem1_sides(&space, 512).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    // 8π ∫ (f')² dt with f' = -sin t
    let oracle = 8.0 * PI * simpson(|t| t.sin().powi(2), 0.0, 2.0 * PI, 20_000);
    let ok = rel(r.lhs, oracle) <= 1e-6 && rel(r.rhs, oracle) <= 1e-6 && r.nodes >= 512 && elapsed < 1.0;
    verdict(1, ok, format!("lhs {} rhs {} oracle {oracle} ({elapsed:.3} s)", r.lhs, r.rhs));
}

#[test]
fn criterion_02_equality_case() {
    let mut ok = true;
    let mut detail = String::new();
    for c in [0.5, 1.0, 3.0] {
        for q in [1, 2, 5] {
            let space = WarpedProductSpace::over_line(catalog::constant(c).unwrap(), FiberDescriptor::sphere(q).unwrap());
            let r = theorem1_sides(&space, 64).unwrap();
            ok &= r.lhs.abs() <= 1e-12 && r.rhs.abs() <= 1e-12 && r.product_verdict;
        }
    }
    detail.push_str("constant warps: both sides 0, product; ");
    // every non-constant catalog warp on a compact base
    for q in [2, 3, 4] {
        for wf in [catalog::two_plus_cos().unwrap(), WarpingFunction::parse("3 + sin(t) ^ 2", catalog::two_plus_cos().unwrap().domain()).unwrap()] {
            let space = WarpedProductSpace::over_line(wf, FiberDescriptor::sphere(q).unwrap());
            let r = theorem1_sides(&space, 256).unwrap();
            ok &= r.rhs > 0.0 && !r.product_verdict;
            detail.push_str(&format!("q={q} rhs {:.4}; ", r.rhs));
        }
    }
    verdict(2, ok, detail);
}

#[test]
fn criterion_03_degenerate_fiber() {
    let space = WarpedProductSpace::over_line(catalog::two_plus_cos().unwrap(), FiberDescriptor::circle(1.0).unwrap());
    let r = theorem1_sides(&space, 512).unwrap();
    let flagged = r.degenerate.as_deref().is_some_and(|n| n.contains("degenerate"));
    let ok = r.lhs.abs() <= 1e-10 && r.rhs.abs() <= 1e-10 && flagged;
    verdict(3, ok, format!("lhs {:e} rhs {:e} flagged {flagged}", r.lhs, r.rhs));
}

#[test]
fn criterion_04_log_warp_identity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let mut warps = catalog::defaults().unwrap();
    warps.push(schwarzschild());
    let mut worst: f64 = 0.0;
    for wf in warps {
        let space = WarpedProductSpace::over_line(wf.clone(), FiberDescriptor::sphere(2).unwrap());
        let (start, len) = wf.domain().span();
        for _ in 0..100 {
            worst = worst.max(space.log_warp_identity_residual(&[start + len * rng.gen::<f64>()]).unwrap());
        }
    }
    verdict(4, worst <= 1e-10, format!("max residual {worst:e} over 100 points per catalog warp"));
}

#[test]
fn criterion_05_noncompact_window() {
    let wf = catalog::cosh(1.0).unwrap();
    let v = noncompact_window_integral(&wf, 2, 4.0 * PI, -1.0, 1.0, 256).unwrap();
    // -8π ∫ cosh² t dt = -8π (1 + sinh(2)/2)
    let oracle = -8.0 * PI * (1.0 + 2f64.sinh() / 2.0);
    verdict(5, v < 0.0 && rel(v, oracle) <= 1e-8, format!("value {v} oracle {oracle}"));
}

#[test]
fn criterion_06_normality_and_corollary() {
    let m = make_rotation_hypersurface(&catalog::two_plus_cos().unwrap(), 3).unwrap();
    // graph r = 2 + cos x₁: the normal makes angle acos(|r'| / sqrt(1 + r'²)) with e₁
    let oracle = |t: f64| (t.sin().abs() / (1.0 + t.sin().powi(2)).sqrt()).acos();
    let a0 = intersection_angle(&m, 0.0).unwrap();
    let norm0 = slice_geodesity(&m, 0.0).unwrap().norm;
    let a1 = intersection_angle(&m, FRAC_PI_2).unwrap();
    let rep = decomposition_check(&m, Section::Hyperplane, FRAC_PI_2, 1e-4, false).unwrap();
    let balance = rep.plus_residual.min(rep.minus_residual);
    let ok = (a0 - FRAC_PI_2).abs() <= 1e-10
        && (a0 - oracle(0.0)).abs() <= 1e-10
        && norm0 <= 1e-8
        && (a1 - FRAC_PI_4).abs() <= 1e-8
        && (a1 - oracle(FRAC_PI_2)).abs() <= 1e-8
        && balance <= 1e-6;
    verdict(6, ok, format!("angle(0) {a0} norm {norm0:e}; angle(pi/2) {a1}; corollary residual {balance:e}"));
}

#[test]
fn criterion_07_height_lemma() {
    let wf = catalog::two_plus_cos().unwrap();
    let steps = [1e-2, 5e-3, 2.5e-3];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in random_curves(&wf, 20, 7).unwrap() {
        let errs: Vec<f64> = steps.iter().map(|h| c.height_laplacian_check(*h, 16).unwrap().max_residual).collect();
        for w in errs.windows(2) {
            let o = (w[0] / w[1]).log2();
            lo = lo.min(o);
            hi = hi.max(o);
        }
    }
    verdict(7, lo >= 1.7 && hi <= 2.3, format!("observed orders in [{lo:.3}, {hi:.3}] over 20 curves"));
}

#[test]
fn criterion_08_parabolicity_witness() {
    let mut ok = true;
    let mut detail = String::new();
    for n in [3usize, 4, 5] {
        let worst = parabolicity_witness(n, 10_000, 8).unwrap();
        // Δ(1+ρ²)^{-(n-2)/2} = -n(n-2)(1+ρ²)^{-(n+2)/2}
        let nf = n as f64;
        let oracle_err = [0.0, 0.3, 1.0, 4.0, 9.5]
            .iter()
            .map(|&r: &f64| (witness_laplacian(n, r).unwrap() + nf * (nf - 2.0) * (1.0 + r * r).powf(-(nf + 2.0) / 2.0)).abs())
            .fold(0.0, f64::max);
        ok &= worst <= 1e-12 && oracle_err <= 1e-12;
        detail.push_str(&format!("n={n} max {worst:e}; "));
    }
    verdict(8, ok, detail);
}

#[test]
fn criterion_09_discrete_slice_spectrum() {
    let wf = catalog::two_plus_cos().unwrap();
    let t = FRAC_PI_2;
    let f = wf.value(t).unwrap();
    let fiber = FiberDescriptor::circle(1.0).unwrap();
    let exact = slice_spectrum(&fiber, &wf, t, 4).unwrap();
    // analytic fiber spectrum of the unit circle: 1, 1, 4, 4, rescaled by f⁻²
    let analytic = [1.0, 1.0, 4.0, 4.0].map(|l: f64| l / (f * f));
    let rescale_ok = exact.iter().zip(&analytic).all(|(a, b)| (a - b).abs() <= 1e-15);
    let errs: Vec<f64> = [32usize, 64, 128, 256]
        .iter()
        .map(|&n| (lowest_eigenpairs(&DiscreteLaplacian::circle(f, n).unwrap(), 1, LANCZOS_SEED).unwrap()[0].value - 1.0 / (f * f)).abs())
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = rescale_ok && orders.iter().all(|o| (o - 2.0).abs() <= 0.2);
    verdict(9, ok, format!("orders {orders:?}"));
}

#[test]
fn criterion_10_reilly_disc_cos2() {
    let expected = -8.0 * PI;
    let mut errs = Vec::new();
    let mut timing = 0.0;
    let mut last = None;
    for n in [64usize, 128, 256] {
        let start = Instant::now();
        let l = reilly_ledger(&disc_solution(n, 2)).unwrap();
        timing = start.elapsed().as_secs_f64();
        errs.push(rel(l.lhs, expected).max(rel(l.rhs, expected)));
        last = Some(l);
    }
    let l = last.unwrap();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let ok = errs[2] <= 0.02 && monotone && timing < 10.0;
    verdict(10, ok, format!("lhs {} rhs {} errors {errs:?} ({timing:.2} s at 256x256)", l.lhs, l.rhs));
}

#[test]
fn criterion_11_eigenvalue_bound_sharpness() {
    let b1 = theorem4_bound(&disc_solution(128, 1), 1.0).unwrap();
    let b2 = theorem4_bound(&disc_solution(128, 2), 4.0).unwrap();
    // closed forms: ∫sin²θ / ∫cos²θ = 1 and ∫4 sin²2θ / ∫cos²2θ = 4
    let ok = (b1.lower_bound - 1.0).abs() <= 0.01 && (b2.lower_bound - 4.0).abs() <= 0.04 && b2.margin > 0.0;
    verdict(11, ok, format!("cos: bound {} (lambda^2 1); cos2: bound {} margin {}", b1.lower_bound, b2.lower_bound, b2.margin));
}

#[test]
fn criterion_12_square_completion() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    let mut worst = f64::INFINITY;
    for (sol, lambda) in [(disc_solution(64, 1), 1.0), (disc_solution(64, 2), 4.0), (schwarzschild_sheet(64), 1.0)] {
        worst = worst.min(square_completion_check(&sol, lambda, None).unwrap());
        let vertex = square_vertex(&sol, lambda).unwrap();
        worst = worst.min(square_completion_check(&sol, lambda, Some(&vertex)).unwrap());
        let perturbed: Vec<f64> = vertex.iter().map(|v| v + rng.gen_range(-1.0..1.0)).collect();
        worst = worst.min(square_completion_check(&sol, lambda, Some(&perturbed)).unwrap());
    }
    verdict(12, worst >= -1e-12, format!("minimum {worst:e}"));
}

#[test]
fn criterion_13_kappa_proposition() {
    let k1 = kappa_bound_check(&disc_solution(128, 1), 1.0).unwrap();
    let k2 = kappa_bound_check(&disc_solution(128, 2), 4.0).unwrap();
    let ok = rel(k1.lhs, PI) <= 0.01
        && rel(k1.rhs, PI) <= 0.01
        && rel(k2.lhs, 4.0 * PI) <= 0.01
        && rel(k2.rhs, 4.0 * PI) <= 0.01
        && [k1, k2].iter().all(|k| k.green_residual <= 0.01 && k.dirichlet_energy_residual <= 0.01);
    verdict(
        13,
        ok,
        format!("cos: {} = {}; cos2: {} = {}; green {:e}, {:e}", k1.lhs, k1.rhs, k2.lhs, k2.rhs, k1.green_residual, k2.green_residual),
    );
}

#[test]
fn criterion_14_first_eigenvalue_bound() {
    let scenario = include_str!("../scenarios/slice-spectrum.json");
    let report = run_text(scenario, &RunOptions::default()).unwrap();
    let curve = ClosedCurveInSurface::new(
        catalog::two_plus_cos().unwrap(),
        CurveShape::CoordinateCircle { center_t: 0.0, center_theta: 1.0, radius: 1.0 },
    )
    .unwrap();
    let b = theorem3_bound(&curve, 512).unwrap();
    // λ₁ of a closed curve of length ℓ is (2π/ℓ)²
    let exact = (2.0 * PI / curve.length(4096).unwrap()).powi(2);
    let g = gradient_identity_check(&curve, &[1e-2, 5e-3, 2.5e-3], 64).unwrap();
    let decreasing = g.residuals.windows(2).all(|w| w[1] < w[0]);
    let ok = report.pass
        && rel(b.lambda1, exact) <= 0.01
        && b.margin >= -0.02 * b.lambda1
        && b.rayleigh_lhs <= b.rayleigh_rhs
        && decreasing;
    verdict(
        14,
        ok,
        format!("bound {} lambda1 {} (exact {exact}); residuals {:?}", b.bound, b.lambda1, g.residuals),
    );
}

#[test]
fn criterion_15_schwarzschild_pipeline() {
    let scenario = include_str!("../scenarios/schwarzschild-reilly.json");
    let report = run_text(scenario, &RunOptions::default()).unwrap();
    let wf = schwarzschild();
    let signs = wf.profile().sign_report(4096).unwrap();
    let sol = schwarzschild_sheet(128);
    let ledger = reilly_ledger(&sol).unwrap();
    let b = theorem4_bound(&sol, 1.0).unwrap();
    let ok = signs.h_positive
        && report.pass
        && !ledger.nonpositive_mean_curvature
        && ledger.relative_residual <= 0.02
        && b.margin >= -0.02 * b.lambda_sq;
    verdict(15, ok, format!("min H {}; ledger residual {:e}; bound {} margin {}", signs.min_h, ledger.relative_residual, b.lower_bound, b.margin));
}
