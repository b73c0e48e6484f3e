use std::f64::consts::PI;
use std::path::Path;

use nsf::diagnostics::*;
use nsf::elliptic::ScreenedSolver;
use nsf::manufactured::{channel_grid, fit_order, linear_step_problem, trans_identity_case};
use nsf::norms::{self, NormReport};
use nsf::picard::*;
use nsf::run::Prepared;
use nsf::*;
use proptest::prelude::*;

fn prepared(name: &str) -> Prepared {
    Prepared::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn poincare_of_a_constant() {
    let g = channel_grid(16).unwrap();
    let u = ScalarField::constant(&g, 3.0);
    let (lhs, rhs) = poincare_sides(&g, &u, PoincareVariant::BoundaryToVolume);
    // |Ω| = 2, |Γ_in| = 1, no gradient
    assert!(close(lhs, 9.0 * 2.0, 1e-12) && close(rhs, 9.0, 1e-12));
    let (lhs, rhs) = poincare_sides(&g, &u, PoincareVariant::BoundaryToBoundary);
    assert!(close(lhs, 9.0, 1e-12) && close(rhs, 9.0, 1e-12));
}

#[test]
fn poincare_of_a_cross_sectional_sine() {
    let g = channel_grid(64).unwrap();
    let u = ScalarField::from_fn(&g, |_, x| (PI * x[1]).sin());
    let (lhs, rhs) = poincare_sides(&g, &u, PoincareVariant::BoundaryToVolume);
    // ∫_Ω sin² = 1, ∫_Γin sin² = ½, ∫|∇u|² = π²
    assert!(close(lhs, 1.0, 1e-6), "{lhs}");
    assert!(close(rhs, 0.5 + PI * PI, 5e-3), "{rhs}");
}

#[test]
fn korn_form_of_a_constant_field() {
    let g = channel_grid(16).unwrap();
    let u = VectorField::from_fn(&g, |_, _| vec![1.0, 0.0]);
    let alpha = 10.0;
    // walls carry α|u_τ|² over length 2 each, Γ_in and Γ_out carry (u·n)² over length 1
    assert!(close(korn_form(&g, &u, 1.0, alpha), 4.0 * alpha + 2.0, 1e-12));
    let (lhs, rhs) = korn_sides(&g, &u, 1.0, alpha);
    assert!(close(lhs, 2.0, 1e-12) && rhs > 0.0);
}

#[test]
fn rigid_rotation_has_no_volume_term() {
    let g = channel_grid(16).unwrap();
    let u = VectorField::from_fn(&g, |_, x| vec![-x[1], x[0]]);
    let boundary_only = korn_form(&g, &u, 0.0, 10.0);
    assert!((korn_form(&g, &u, 1.0, 10.0) - boundary_only).abs() < 1e-10);
    assert!(boundary_only > 0.0);
}

#[test]
fn interpolation_of_a_constant() {
    let g = channel_grid(16).unwrap();
    let f = ScalarField::constant(&g, -2.0);
    let (lhs, rhs) = interpolation_sides(&g, &f, 0.1, 4.0);
    assert!(close(lhs / rhs, 2f64.powf(0.25 - 0.5), 1e-12));
}

#[test]
fn dual_norm_of_zero_is_zero() {
    let g = channel_grid(16).unwrap();
    let s = ScreenedSolver::new(&g).unwrap();
    assert_eq!(dual_norm(&g, &s, &VectorField::zeros(&g)), 0.0);
}

#[test]
fn calibration_is_deterministic_and_verifies() {
    let p = prepared("small_data.toml");
    let coef = p.coefficients();
    let counts = SampleCounts { fields: 40, datasets: 6, transport: 20 };
    let cal = Calibration::calibrate(&p.grid, &coef, 4.0, DEFAULT_SEED, counts).unwrap();
    let again = Calibration::calibrate(&p.grid, &coef, 4.0, DEFAULT_SEED, counts).unwrap();
    assert_eq!(cal.to_json().unwrap(), again.to_json().unwrap());
    assert!(cal.interpolation_monotone());
    for (id, c) in &cal.constants {
        assert!(c.constant > 0.0 && c.constant == CALIBRATION_FACTOR * c.max_ratio, "{id}");
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("calibration.json");
    cal.save(&path).unwrap();
    assert_eq!(Calibration::load(&path).unwrap(), cal);

    let verdicts = cal.verify(&p.grid, &coef, DEFAULT_SEED + 1).unwrap();
    assert_eq!(verdicts.len(), cal.constants.len());
    for v in &verdicts {
        assert!(v.pass, "{v:?}");
    }
}

#[test]
fn every_registered_checker_passes_on_its_own_family() {
    let p = prepared("small_data.toml");
    let coef = p.coefficients();
    let counts = SampleCounts { fields: 20, datasets: 4, transport: 10 };
    let cal = Calibration::calibrate(&p.grid, &coef, 4.0, 11, counts).unwrap();
    let table = draw_samples(&p.grid, &coef, 4.0, 11, counts).unwrap();
    assert!(cal.judge(&table).iter().all(|v| v.violations == 0));
    // the Korn form controls the W¹₂ norm from below, never degenerately
    assert!(table["korn"].iter().all(|&(l, r)| l > 0.0 && r > 0.0));
}

#[test]
fn energy_estimate_on_zero_and_manufactured_data() {
    let p = prepared("small_data.toml");
    let coef = p.coefficients();
    let g = &p.grid;
    let screened = ScreenedSolver::new(g).unwrap();
    let zero = assemble_fgh(&prepared("background_only.toml").setup, &FlowState::zeros(g)).unwrap();
    let v = InequalityVerdict::new("energy", energy_sides(g, &screened, &zero, &FlowState::zeros(g)), 1.0);
    assert!(v.pass && v.lhs == 0.0 && v.rhs == 0.0);

    let (data, _) = linear_step_problem(g, &coef);
    let solver = LinearStepSolver::new(g, coef, InnerSettings::default()).unwrap();
    let (sol, _) = solver.solve(&data, &FlowState::zeros(g)).unwrap();
    let (lhs, rhs) = energy_sides(g, &screened, &data, &sol);
    assert!(lhs > 0.0 && rhs > 0.0 && lhs / rhs < 10.0);
}

#[test]
fn trans_identity_residual_is_first_order() {
    let coef = prepared("small_data.toml").coefficients();
    let (mut hs, mut rs) = (Vec::new(), Vec::new());
    for n in [16, 32, 64] {
        let g = channel_grid(n).unwrap();
        hs.push(g.h(0));
        rs.push(trans_identity_case(&g, coef).unwrap());
    }
    let order = fit_order(&hs, &rs);
    assert!(order >= 0.9, "order {order}, residuals {rs:?}");
}

#[test]
fn helmholtz_split_of_a_gradient() {
    let g = channel_grid(32).unwrap();
    let u = VectorField::from_fn(&g, |_, x| vec![PI * (PI * x[0]).cos() * x[1], (PI * x[0]).sin()]);
    let split = helmholtz_split(&g, &u).unwrap();
    assert!(split.solenoidal.max_abs() < 0.05 * u.max_abs(), "{}", split.solenoidal.max_abs());
    assert!(split.gradient.add(&split.solenoidal).sub(&u).max_abs() < 1e-12);
}

#[test]
fn background_residual_vanishes() {
    let p = prepared("background_only.toml");
    let fields = p.setup.reconstruct(&FlowState::zeros(&p.grid)).unwrap();
    let r = residual_main_system(&p.grid, &fields, &p.setup.data, &p.setup.thermo, &p.setup.params);
    assert!(r.max() <= 1e-10, "{r:?}");
}

#[test]
fn converged_small_data_residual_is_small_and_random_fields_are_not() {
    let p = prepared("small_data.toml");
    let out = picard_iterate(&p.setup, &FlowState::zeros(&p.grid), &p.settings).unwrap();
    let fields = p.setup.reconstruct(&out.state).unwrap();
    let r = residual_main_system(&p.grid, &fields, &p.setup.data, &p.setup.thermo, &p.setup.params);
    assert!(r.balance() <= 1e-6, "{r:?}");
    let noisy = p.setup.reconstruct(&FlowState::random_smooth(&p.grid, 5).scaled(0.1)).unwrap();
    let r = residual_main_system(&p.grid, &noisy, &p.setup.data, &p.setup.thermo, &p.setup.params);
    assert!(r.balance() > 1e-2, "{r:?}");
}

#[test]
fn perturbation_and_physical_residuals_agree() {
    let p = prepared("small_data.toml");
    for seed in 0..5 {
        let s = FlowState::random_smooth(&p.grid, seed).scaled(0.1);
        let pert = perturbation_residual(&p.setup, &s).unwrap();
        let fields = p.setup.reconstruct(&s).unwrap();
        let r = residual_main_system(&p.grid, &fields, &p.setup.data, &p.setup.thermo, &p.setup.params);
        for (a, b) in pert.iter().zip([r.momentum, r.continuity, r.energy]) {
            assert!((a - b).abs() <= 1e-9 * b.max(1.0), "seed {seed}: {pert:?} vs {r:?}");
        }
    }
}

#[test]
fn slice_norm_of_a_sine_converges() {
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [8, 16, 32] {
        let g = channel_grid(n).unwrap();
        let f = ScalarField::from_fn(&g, |_, x| (PI * x[1]).sin() * (1.0 + 0.3 * x[0] * x[0]));
        // exact ∫ over (0,2)×(0,1) of sin²(πx₂)(1 + 0.3x₁²)² = ½ · (2 + 1.6 + 0.576)
        let exact = (0.5 * (2.0 + 1.6 + 0.576f64)).sqrt();
        errs.push((norms::lp(&g, &f, 2.0) - exact).abs());
        hs.push(g.h(0));
    }
    assert!(fit_order(&hs, &errs) >= 1.8, "{errs:?}");
}

#[test]
fn norm_report_of_unit_field() {
    let g = channel_grid(16).unwrap();
    let r = NormReport::of(&g, "one", &ScalarField::constant(&g, 1.0), 4.0);
    assert!(close(r.l2, 2f64.sqrt(), 1e-12) && close(r.lp, 2f64.powf(0.25), 1e-12));
    assert!(close(r.trace_inflow, 1.0, 1e-12) && close(r.trace_wall, 2.0, 1e-12));
    assert!(r.holder_consistent(&g));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn verdict_pass_iff_lhs_within_constant(lhs in 0.0f64..10.0, rhs in 0.0f64..10.0, c in 0.0f64..5.0) {
        let v = InequalityVerdict::new("x", (lhs, rhs), c);
        prop_assert_eq!(v.pass, lhs <= c * rhs);
    }

    #[test]
    fn checker_sides_are_nonnegative_and_homogeneous(seed in 0u64..10_000, s in 0.1f64..10.0) {
        let g = channel_grid(16).unwrap();
        let mut rng = SampleRng::new(seed);
        let f = rng.scalar(&g);
        let u = rng.tangent(&g, 1.0);
        for variant in [PoincareVariant::BoundaryToBoundary, PoincareVariant::BoundaryToVolume] {
            let (l, r) = poincare_sides(&g, &f, variant);
            let (ls, rs) = poincare_sides(&g, &f.scaled(s), variant);
            prop_assert!(l >= 0.0 && r > 0.0);
            prop_assert!(close(ls, s * s * l, 1e-10) && close(rs, s * s * r, 1e-10));
        }
        let (l, r) = korn_sides(&g, &u, 1.0, 10.0);
        prop_assert!(l > 0.0 && r > 0.0);
        let mut last = 0.0;
        for eps in [0.5, 0.1, 0.02] {
            let (l, r) = interpolation_sides(&g, &f, eps, 4.0);
            prop_assert!(l >= last && r > 0.0);
            last = l;
        }
    }
}
