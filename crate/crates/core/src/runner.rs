//! Runs the checks declared by a scenario and collects them into a report.
//! Checks run in a fixed order so reports are byte-stable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};
use crate::geometry::{Warp, WarpedProductSpace};
use crate::integral::{noncompact_window_integral, theorem1_sides, PRODUCT_SPREAD_TOL};
use crate::intersection::{
    decomposition_check, make_rotation_hypersurface, parabolicity_witness, random_curves, CorollarySign, Section,
    DEFAULT_FD_STEP, NORMALITY_TOL,
};
use crate::report::{CheckRecord, Provenance, RefinementStep, VerificationReport};
use crate::scenario::{ReillySection, Scenario, Suite, Theorem1Section, Tolerances};
use crate::spectral::{
    gradient_identity_check, harmonic_extension, kappa_bound_check, lowest_eigenpairs, reilly_ledger,
    slice_spectrum, square_completion_check, theorem3_bound, theorem4_bound, ClosedCurveInSurface,
    DirichletProblem, DiscreteLaplacian, RotationalDomain, RotationalProfile, EIGEN_RESIDUAL_TOL, LANCZOS_SEED,
};

/// Absolute floor for the nonnegative side of the integral inequality.
pub const NONNEGATIVE_FLOOR: f64 = 1e-14;
/// Residual bound for the pointwise log-warp identity.
pub const LOG_WARP_TOL: f64 = 1e-10;
const HEIGHT_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
const HEIGHT_SAMPLES: usize = 16;
const ANGLE_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
const ANGLE_SAMPLES: usize = 64;

/// Command-line overrides applied on top of the scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub refine: Option<usize>,
    pub tolerance_scale: f64,
    /// Starting quadrature nodes for the integral suite.
    pub nodes: Option<usize>,
    /// Run only this suite instead of the scenario's own.
    pub suite: Option<Suite>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: None, refine: None, tolerance_scale: 1.0, nodes: None, suite: None }
    }
}

struct Ctx<'a> {
    scenario: &'a Scenario,
    tol: Tolerances,
    scale: f64,
    seed: u64,
    refine: usize,
    nodes: Option<usize>,
    checks: Vec<CheckRecord>,
    rows: Vec<[f64; 3]>,
}

/// Parse the scenario text and run it.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<VerificationReport> {
    let scenario = Scenario::parse(text)?;
    run(&scenario, text, opts)
}

pub fn run(scenario: &Scenario, text: &str, opts: &RunOptions) -> Result<VerificationReport> {
    if !(opts.tolerance_scale > 0.0) {
        return Err(LabError::InvalidScenario(format!("tolerance scale must be positive, got {}", opts.tolerance_scale)));
    }
    let seed = opts.seed.unwrap_or(scenario.seed);
    let suite = opts.suite.unwrap_or(scenario.suite);
    let mut ctx = Ctx {
        scenario,
        tol: scenario.tolerances.scaled(opts.tolerance_scale),
        scale: opts.tolerance_scale,
        seed,
        refine: opts.refine.unwrap_or(scenario.refine),
        nodes: opts.nodes,
        checks: Vec::new(),
        rows: Vec::new(),
    };
    let context = |e: LabError| match e {
        LabError::Precondition(m) => LabError::Precondition(format!("scenario '{}': {m}", scenario.name)),
        LabError::InvalidScenario(m) => LabError::InvalidScenario(format!("scenario '{}': {m}", scenario.name)),
        other => other,
    };
    if suite.includes(Suite::Theorem1) {
        ctx.theorem1().map_err(context)?;
    }
    if suite.includes(Suite::Intersections) && (suite == Suite::Intersections || scenario.intersections.is_some()) {
        ctx.intersections().map_err(context)?;
    }
    if suite.includes(Suite::Spectral) && (suite == Suite::Spectral || scenario.spectral.is_some()) {
        ctx.spectral().map_err(context)?;
    }
    if suite.includes(Suite::Reilly) && (suite == Suite::Reilly || scenario.reilly.is_some()) {
        ctx.reilly().map_err(context)?;
    }
    let mut report = VerificationReport::new(scenario.name.clone(), suite, ctx.checks, Provenance::new(text, seed));
    report.intersection_rows = ctx.rows;
    Ok(report)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn step(resolution: f64, value: f64) -> RefinementStep {
    RefinementStep { resolution, value }
}

impl Ctx<'_> {
    fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    fn theorem1(&mut self) -> Result<()> {
        let section = self.scenario.theorem1.clone().unwrap_or_default();
        let space = self.scenario.space()?;
        let nodes = self.nodes.unwrap_or(section.nodes);
        if space.base_is_compact() {
            self.identity(&space, &section, nodes)?;
        }
        self.log_warp(&space, &section)?;
        if let Some([a, b]) = section.window {
            self.window(&space, a, b, section.expect_window_negative, nodes)?;
        }
        Ok(())
    }

    fn identity(&mut self, space: &WarpedProductSpace, section: &Theorem1Section, nodes: usize) -> Result<()> {
        let t = self.tol;
        let mut history = Vec::new();
        let mut report = None;
        for k in 0..=self.refine {
            let n = nodes << k;
            let r = theorem1_sides(space, n)?;
            history.push(step(n as f64, r.residual));
            report = Some(r);
        }
        let r = report.expect("at least one level");
        let mut c = CheckRecord::new(
            "theorem1.identity",
            "horizontal-ricci-integral-identity",
            r.lhs,
            r.rhs,
            r.relative_residual(),
            t.identity,
        )
        .history(history);
        if let Some(note) = &r.degenerate {
            c = c.note(note.clone());
        }
        self.push(c);

        self.push(CheckRecord::new(
            "theorem1.nonnegative",
            "integral-inequality-nonnegative",
            r.lhs,
            0.0,
            (-r.rhs).max(0.0),
            NONNEGATIVE_FLOOR * self.scale(),
        ));

        let constant = r.warp_spread <= PRODUCT_SPREAD_TOL;
        let mut eq = CheckRecord::with_verdict(
            "theorem1.equality-case",
            "equality-iff-constant-warp",
            r.residual,
            r.warp_spread,
            r.relative_residual(),
            t.identity,
            r.product_verdict == constant && section.expect_product.is_none_or(|e| e == r.product_verdict),
        )
        .note(if r.product_verdict { "product" } else { "not a product" });
        if r.degenerate.is_some() {
            eq = eq.note("degenerate");
        }
        self.push(eq);

        if let Some(expect) = section.expect {
            let res = rel(r.lhs, expect).max(rel(r.rhs, expect));
            self.push(CheckRecord::new("theorem1.expected", "closed-form-value", r.lhs, expect, res, t.identity));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.scale
    }

    fn log_warp(&mut self, space: &WarpedProductSpace, section: &Theorem1Section) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..section.log_warp_points {
            let point: Vec<f64> = match space.warp() {
                Warp::OneD(w) => {
                    let (start, len) = w.domain().span();
                    vec![start + len * rng.gen::<f64>()]
                }
                Warp::Torus(f) => f.periods().iter().map(|p| p * rng.gen::<f64>()).collect(),
            };
            worst = worst.max(space.log_warp_identity_residual(&point)?);
        }
        self.push(
            CheckRecord::new("theorem1.log-warp", "log-warp-hessian-identity", worst, 0.0, worst, LOG_WARP_TOL * self.scale())
                .note(format!("{} random points", section.log_warp_points)),
        );
        Ok(())
    }

    fn window(&mut self, space: &WarpedProductSpace, a: f64, b: f64, negative: Option<bool>, nodes: usize) -> Result<()> {
        let Warp::OneD(wf) = space.warp() else {
            return Err(LabError::InvalidScenario("the window integral needs a warp of one variable".into()));
        };
        let v = noncompact_window_integral(wf, space.fiber_dim(), space.fiber().volume, a, b, nodes)?;
        let verdict = match negative {
            Some(true) => v < 0.0,
            Some(false) => v >= 0.0,
            None => true,
        };
        self.push(
            CheckRecord::with_verdict("theorem1.window", "noncompact-window-sign", v, 0.0, v.min(0.0).abs(), 0.0, verdict)
                .note(format!("window [{a}, {b}]")),
        );
        Ok(())
    }

    fn intersections(&mut self) -> Result<()> {
        let sec = self.scenario.intersections.clone().ok_or_else(|| {
            LabError::InvalidScenario("the intersections suite needs an 'intersections' section".into())
        })?;
        let wf = self.scenario.one_d_warp("the intersections suite")?;
        let t = self.tol;
        if !sec.levels.is_empty() {
            let m = make_rotation_hypersurface(&wf, sec.ambient_dim)?;
            for &t0 in &sec.levels {
                for &section in &sec.sections {
                    let r = decomposition_check(&m, section, t0, DEFAULT_FD_STEP, false)?;
                    let tag = match section {
                        Section::Hyperplane => format!("hyperplane@{t0}"),
                        Section::Sphere { center } => format!("sphere({center})@{t0}"),
                    };
                    let mag = r.scalar_sigma_in_m.abs().max(r.scalar_sigma_in_n.abs()).max(r.scalar_n.abs());
                    let cor_tol = crate::intersection::corollary_tolerance(r.step, mag) * self.scale;
                    self.push(CheckRecord::new(
                        format!("intersection.decomposition[{tag}]"),
                        "intersection-mean-curvature-decomposition",
                        norm(&r.mean_curv_sigma_in_m),
                        norm(&r.projected_sum),
                        r.decomposition_residual,
                        t.fd,
                    ));
                    let sign = match r.matched_sign {
                        CorollarySign::Plus => "plus",
                        CorollarySign::Minus => "minus",
                        CorollarySign::Both => "both",
                        CorollarySign::Neither => "neither",
                    };
                    self.push(
                        CheckRecord::new(
                            format!("intersection.corollary[{tag}]"),
                            "intersection-scalar-corollary",
                            r.scalar_sigma_in_m,
                            r.scalar_sigma_in_n * r.cos_angle,
                            r.plus_residual.min(r.minus_residual),
                            cor_tol,
                        )
                        .note(format!("sign {sign}, angle {}", r.angle)),
                    );
                    if section == Section::Hyperplane {
                        let geodesic = r.slice_second_form_norm <= NORMALITY_TOL;
                        self.push(CheckRecord::with_verdict(
                            format!("intersection.normality[{tag}]"),
                            "normal-iff-slice-totally-geodesic",
                            r.cos_angle,
                            r.slice_second_form_norm,
                            r.cos_angle.abs().min(r.slice_second_form_norm),
                            NORMALITY_TOL,
                            r.normal_verdict == geodesic,
                        ));
                        self.rows.push([t0, r.angle, r.slice_second_form_norm]);
                    }
                }
            }
        }

        if sec.curves > 0 {
            let curves = random_curves(&wf, sec.curves, self.seed)?;
            let mut worst = vec![0.0f64; HEIGHT_STEPS.len()];
            let mut min_order = f64::INFINITY;
            let mut max_dev: f64 = 0.0;
            for c in &curves {
                let errs: Vec<f64> = HEIGHT_STEPS
                    .iter()
                    .map(|h| c.height_laplacian_check(*h, HEIGHT_SAMPLES).map(|r| r.max_residual))
                    .collect::<Result<_>>()?;
                for (w, e) in worst.iter_mut().zip(&errs) {
                    *w = w.max(*e);
                }
                for o in errs.windows(2).map(|w| (w[0] / w[1]).log2()) {
                    min_order = min_order.min(o);
                    max_dev = max_dev.max(if o.is_finite() { (o - 2.0).abs() } else { f64::INFINITY });
                }
            }
            let hist = HEIGHT_STEPS.iter().zip(&worst).map(|(h, e)| step(1.0 / h, *e)).collect();
            self.push(
                CheckRecord::new("intersection.height", "height-function-laplacian", min_order, 2.0, max_dev, t.order)
                    .history(hist)
                    .note(format!("{} random arclength curves", curves.len())),
            );
        }

        for &n in &sec.parabolic_dims {
            let worst = parabolicity_witness(n, sec.samples, self.seed)?;
            self.push(
                CheckRecord::new(format!("intersection.parabolic[n={n}]"), "nonconstant-superharmonic-witness", worst, 0.0, worst.max(0.0), t.zero)
                    .note(format!("{} samples", sec.samples)),
            );
        }
        Ok(())
    }

    fn spectral(&mut self) -> Result<()> {
        let sec = self.scenario.spectral.clone().ok_or_else(|| {
            LabError::InvalidScenario("the spectral suite needs a 'spectral' section".into())
        })?;
        let wf = self.scenario.one_d_warp("the spectral suite")?;
        let fiber = self.scenario.fiber.build()?;
        let t = self.tol;

        if let Some(t0) = sec.slice_t {
            let exact = slice_spectrum(&fiber, &wf, t0, 1)?;
            let exact = *exact.first().ok_or(LabError::MissingSpectrum)?;
            let radius = match fiber.dim {
                1 => fiber.volume / (2.0 * std::f64::consts::PI),
                _ => return Err(LabError::InvalidScenario("the discrete slice check needs a circle fiber".into())),
            };
            let f = wf.value(t0)?;
            let levels = self.refine.max(2);
            let mut hist = Vec::new();
            let mut finest = (0.0, 0.0);
            for k in 0..=levels {
                let n = sec.circle_nodes << k;
                let pair = lowest_eigenpairs(&DiscreteLaplacian::circle(radius * f, n)?, 1, LANCZOS_SEED)?.remove(0);
                hist.push(step(n as f64, (pair.value - exact).abs()));
                finest = (pair.value, pair.relative_residual);
            }
            let orders: Vec<f64> = hist.windows(2).map(|w| (w[0].value / w[1].value).log2()).collect();
            let dev = orders.iter().map(|o| if o.is_finite() { (o - 2.0).abs() } else { f64::INFINITY }).fold(0.0, f64::max);
            self.push(
                CheckRecord::new("spectral.slice-rescale", "slice-laplacian-rescaling", finest.0, exact, rel(finest.0, exact), t.mesh)
                    .note(format!("slice t = {t0}, scale f = {f}")),
            );
            self.push(
                CheckRecord::new("spectral.slice-order", "slice-laplacian-rescaling", orders.iter().cloned().fold(f64::INFINITY, f64::min), 2.0, dev, t.eigen_order)
                    .history(hist),
            );
            self.push(CheckRecord::new(
                "spectral.eigen-residual",
                "discrete-eigenpair",
                finest.1,
                0.0,
                finest.1,
                EIGEN_RESIDUAL_TOL * self.scale(),
            ));
        }

        if let Some(shape) = sec.curve {
            let curve = ClosedCurveInSurface::new(wf.clone(), shape)?;
            let b = theorem3_bound(&curve, sec.curve_nodes)?;
            self.push(
                CheckRecord::new(
                    "spectral.first-eigen-bound",
                    "first-eigenvalue-upper-bound",
                    b.bound,
                    b.lambda1,
                    ((b.lambda1 - b.bound) / b.lambda1).max(0.0),
                    t.mesh,
                )
                .note(format!("margin {}", b.margin)),
            );
            self.push(CheckRecord::new(
                "spectral.rayleigh",
                "rayleigh-quotient-inequality",
                b.rayleigh_lhs,
                b.rayleigh_rhs,
                ((b.rayleigh_lhs - b.rayleigh_rhs) / b.rayleigh_rhs.abs().max(1e-300)).max(0.0),
                t.zero,
            ));
            let g = gradient_identity_check(&curve, &ANGLE_STEPS, ANGLE_SAMPLES)?;
            let decreasing = g.residuals.windows(2).all(|w| w[1] < w[0]);
            let min_order = g.orders.iter().cloned().fold(f64::INFINITY, f64::min);
            let hist = g.steps.iter().zip(&g.residuals).map(|(h, e)| step(1.0 / h, *e)).collect();
            self.push(
                CheckRecord::with_verdict(
                    "spectral.angle-gradient",
                    "angle-gradient-identity",
                    min_order,
                    1.0,
                    *g.residuals.last().unwrap_or(&f64::INFINITY),
                    t.fd,
                    decreasing && min_order >= 1.0 - t.order,
                )
                .history(hist)
                .note(format!("frame defect {:e}", g.frame_defect)),
            );
        }
        Ok(())
    }

    fn reilly(&mut self) -> Result<()> {
        let sec: ReillySection = self.scenario.reilly.clone().ok_or_else(|| {
            LabError::InvalidScenario("the reilly suite needs a 'reilly' section".into())
        })?;
        let profile = self.scenario.rotational_profile(sec.domain)?;
        let lambda = sec.lambda.unwrap_or_else(|| sec.mode.fiber_eigenvalue());
        let t = self.tol;
        let levels = self.refine.max(2);

        let mut ledgers = Vec::new();
        let mut max_principle = true;
        let mut finest = None;
        for k in 0..=levels {
            let n = sec.mesh << k;
            let domain = RotationalDomain::new(profile.clone(), n, n)?;
            let sol = harmonic_extension(&DirichletProblem { domain, data: sec.mode })?;
            max_principle &= sol.max_principle;
            ledgers.push((n, reilly_ledger(&sol)?));
            finest = Some(sol);
        }
        let sol = finest.expect("at least one level");
        let (_, last) = ledgers.last().cloned().expect("at least one level");

        let hist: Vec<_> = ledgers.iter().map(|(n, l)| step(*n as f64, l.relative_residual)).collect();
        let monotone = hist.windows(2).all(|w| w[1].value < w[0].value);
        let mut c = CheckRecord::with_verdict(
            "reilly.identity",
            "reilly-integral-identity",
            last.lhs,
            last.rhs,
            last.relative_residual,
            t.mesh,
            last.relative_residual <= t.mesh && monotone,
        )
        .history(hist)
        .note(format!(
            "volume: laplacian^2 {}, hessian^2 {}, ricci {}; boundary: mean curvature {}, laplacian {}, second form {}",
            last.volume_laplacian_sq,
            last.volume_hessian_sq,
            last.volume_ricci,
            last.boundary_mean_curvature,
            last.boundary_laplacian,
            last.boundary_second_form
        ));
        if !monotone {
            c = c.note("residual not monotone under refinement");
        }
        self.push(c);

        if let Some(expect) = sec.expect {
            let err = |l: &crate::spectral::ReillyLedger| {
                ((l.lhs - expect).abs().max((l.rhs - expect).abs())) / expect.abs().max(1.0)
            };
            let hist: Vec<_> = ledgers.iter().map(|(n, l)| step(*n as f64, err(l))).collect();
            self.push(
                CheckRecord::new("reilly.expected", "closed-form-value", last.lhs, expect, err(&last), t.mesh).history(hist),
            );
        }

        self.push(
            CheckRecord::new(
                "reilly.max-principle",
                "discrete-maximum-principle",
                if max_principle { 1.0 } else { 0.0 },
                1.0,
                if max_principle { 0.0 } else { 1.0 },
                0.0,
            )
            .note(format!("interior residual {:e} at the finest mesh", sol.interior_residual)),
        );

        if let RotationalProfile::Warped { warp, .. } = &profile {
            let s = warp.profile().sign_report(4096)?;
            self.push(
                CheckRecord::with_verdict(
                    "reilly.profile-positive",
                    "positive-slice-mean-curvature",
                    s.min_h,
                    0.0,
                    (-s.min_h).max(0.0),
                    0.0,
                    s.h_positive,
                )
                .note(format!("H over {} samples in [{}, {}]", s.samples, s.min_h, s.max_h)),
            );
        }

        let h_positive = !last.nonpositive_mean_curvature;
        self.push(
            CheckRecord::with_verdict(
                "reilly.mean-curvature-sign",
                "boundary-mean-curvature-hypothesis",
                last.outer_mean_curvature,
                0.0,
                0.0,
                0.0,
                h_positive != sec.expect_nonpositive,
            )
            .note(if h_positive { "H > 0 on the outer boundary" } else { "nonpositive mean curvature" }),
        );

        if h_positive {
            let b = theorem4_bound(&sol, lambda)?;
            self.push(
                CheckRecord::new(
                    "reilly.eigen-bound",
                    "spectral-lower-bound",
                    b.lambda_sq,
                    b.lower_bound,
                    (-b.margin).max(0.0) / b.lambda_sq.max(1e-300),
                    t.mesh,
                )
                .note(format!("ricci {}, second form {}, denominator {}", b.ricci_term, b.second_form_term, b.denominator)),
            );
            if sec.expect_sharp {
                self.push(CheckRecord::new(
                    "reilly.sharpness",
                    "spectral-lower-bound-equality",
                    b.lambda_sq,
                    b.lower_bound,
                    b.margin.abs() / b.lambda_sq.max(1e-300),
                    t.sharp,
                ));
            }
            let sq = square_completion_check(&sol, lambda, None)?;
            self.push(CheckRecord::new(
                "reilly.square-completion",
                "completed-square-nonnegative",
                sq,
                0.0,
                (-sq).max(0.0),
                t.zero,
            ));
        }

        let kc = kappa_bound_check(&sol, lambda)?;
        self.push(
            CheckRecord::new(
                "reilly.kappa-bound",
                "second-form-curvature-bound",
                kc.lhs,
                kc.rhs,
                ((kc.rhs - kc.lhs) / kc.lhs.abs().max(1.0)).max(0.0),
                t.sharp,
            )
            .note(format!("kappa {}", kc.kappa)),
        );
        self.push(CheckRecord::new(
            "reilly.green",
            "green-identity-harmonic",
            kc.dirichlet_energy,
            kc.boundary_flux,
            kc.green_residual,
            t.sharp,
        ));
        self.push(CheckRecord::new(
            "reilly.boundary-energy",
            "boundary-eigenfunction-energy",
            kc.dirichlet_energy_residual,
            0.0,
            kc.dirichlet_energy_residual,
            t.sharp,
        ));
        Ok(())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Error levels of every check with a refinement history, as
/// `(id, resolution, value, order)` rows.
pub fn convergence_table(report: &VerificationReport) -> Vec<(String, f64, f64, Option<f64>)> {
    report
        .checks
        .iter()
        .flat_map(|c| {
            c.refinement_history.iter().enumerate().map(move |(k, s)| {
                let order = k.checked_sub(1).and_then(|i| c.orders.get(i).copied().flatten());
                (c.id.clone(), s.resolution, s.value, order)
            })
        })
        .collect()
}
