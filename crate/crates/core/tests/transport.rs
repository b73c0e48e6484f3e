use std::f64::consts::PI;

use nsf::manufactured::{channel_grid, fit_order};
use nsf::transport::*;
use nsf::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inflow_of(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
    grid.face_nodes(Face::INFLOW).iter().map(|&n| f(grid.coords(n))).collect()
}

fn problem(grid: &Grid, u: impl Fn([f64; 3]) -> [f64; 2], h: impl Fn([f64; 3]) -> f64, w_in: impl Fn([f64; 3]) -> f64) -> TransportProblem {
    TransportProblem::new(
        VectorField::from_fn(grid, |_, x| u(x).to_vec()),
        ScalarField::from_fn(grid, |_, x| h(x)),
        inflow_of(grid, w_in),
    )
}

fn characteristic(p: &TransportProblem, grid: &Grid) -> ScalarField {
    let map = build_characteristics(&GridVelocity { grid, field: &p.velocity }, grid, default_step(grid)).unwrap();
    apply_s_characteristic(p, grid, &map).unwrap()
}

fn generic_velocity(x: [f64; 3]) -> [f64; 2] {
    [0.1 * x[1] - 0.05, 0.1 * (PI * x[1]).sin() * (1.0 + 0.5 * x[0].sin())]
}

#[test]
fn zero_velocity_unit_source_gives_axial_coordinate() {
    let g = channel_grid(16).unwrap();
    let p = problem(&g, |_| [0.0, 0.0], |_| 1.0, |_| 0.0);
    let marched = march(&p, &g).unwrap();
    let traced = characteristic(&p, &g);
    for n in 0..g.n_nodes() {
        let x1 = g.coords(n)[0];
        assert!((marched[n] - x1).abs() < 1e-12);
        assert!((traced[n] - x1).abs() < 1e-12);
    }
}

#[test]
fn zero_velocity_carries_inflow_data_unchanged() {
    let g = channel_grid(16).unwrap();
    let p = problem(&g, |_| [0.0, 0.0], |_| 0.0, |x| (PI * x[1]).sin());
    let traced = characteristic(&p, &g);
    let p2 = problem(&g, |_| [0.0, 0.0], |_| 0.0, |x| x[1]);
    let marched = march(&p2, &g).unwrap();
    for n in 0..g.n_nodes() {
        let x = g.coords(n);
        assert!((traced[n] - (PI * x[1]).sin()).abs() < 1e-12);
        assert_eq!(marched[n], x[1]);
    }
}

#[test]
fn identity_flow_for_zero_velocity() {
    let g = channel_grid(16).unwrap();
    let zero = VectorField::zeros(&g);
    let map = build_characteristics(&GridVelocity { grid: &g, field: &zero }, &g, 0.05).unwrap();
    for t in &map.trajectories {
        for (k, p) in t.points.iter().enumerate() {
            assert!((p[0] - k as f64 * 0.05).abs() < 1e-12);
            assert_eq!(p[1], t.start[1]);
        }
    }
}

#[test]
fn logistic_characteristics_match_closed_form() {
    let g = channel_grid(32).unwrap();
    let eps = 0.1;
    let sampler = FnVelocity(move |x: [f64; 3]| [0.0, eps * x[1] * (1.0 - x[1]), 0.0]);
    let ds = default_step(&g);
    let map = build_characteristics(&sampler, &g, ds).unwrap();
    let mut worst = 0.0f64;
    for t in &map.trajectories {
        let z = t.start[1];
        for (k, p) in t.points.iter().enumerate() {
            let s = k as f64 * ds;
            let exact = z / (z + (1.0 - z) * (-eps * s).exp());
            worst = worst.max((p[1] - exact).abs());
        }
        if z == 0.0 {
            assert!(t.points.iter().all(|p| p[1] == 0.0));
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn marching_and_characteristics_agree_at_first_order() {
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let g = channel_grid(n).unwrap();
        let p = problem(&g, generic_velocity, |x| 1.0 + x[0] * x[1], |x| (PI * x[1]).cos());
        let d = march(&p, &g).unwrap().sub(&characteristic(&p, &g)).max_abs();
        hs.push(g.h(0));
        errs.push(d);
    }
    let order = fit_order(&hs, &errs);
    assert!(order >= 0.9, "order {order}, {errs:?}");
}

#[test]
fn damped_marching_and_characteristics_agree() {
    let mut hs = Vec::new();
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let g = channel_grid(n).unwrap();
        let p = problem(&g, generic_velocity, |x| x[1] - x[0], |x| 1.0 + x[1]).with_damping(0.8);
        hs.push(g.h(0));
        errs.push(march(&p, &g).unwrap().sub(&characteristic(&p, &g)).max_abs());
    }
    assert!(fit_order(&hs, &errs) >= 0.9, "{errs:?}");
}

#[test]
fn damped_exact_solution_without_cross_flow() {
    // w = e^{-γx₁} w_in when U = 0, h = 0
    let g = channel_grid(32).unwrap();
    let p = problem(&g, |_| [0.0, 0.0], |_| 0.0, |_| 1.0).with_damping(0.5);
    let traced = characteristic(&p, &g);
    for n in 0..g.n_nodes() {
        assert!((traced[n] - (-0.5 * g.coords(n)[0]).exp()).abs() < 1e-6);
    }
}

#[test]
fn marching_residual_reproduces_source() {
    let g = channel_grid(16).unwrap();
    let p = problem(&g, generic_velocity, |x| (x[0] * x[1]).cos(), |x| x[1]).with_damping(0.3);
    let w = march(&p, &g).unwrap();
    let r = advection_residual(&g, &p.velocity, &w, 0.3);
    for n in 0..g.n_nodes() {
        if g.multi_index(n)[0] < g.cells(0) {
            assert!((r[n] - p.source[n]).abs() < 1e-10);
        }
    }
}

#[test]
fn preconditions_are_enforced() {
    let g = channel_grid(16).unwrap();
    let leaky = problem(&g, |_| [0.0, 0.1], |_| 0.0, |_| 0.0);
    assert!(matches!(march(&leaky, &g), Err(NsfError::TransportPrecondition(_))));
    let slow = problem(&g, |_| [-0.6, 0.0], |_| 0.0, |_| 0.0);
    assert!(matches!(march(&slow, &g), Err(NsfError::TransportPrecondition(_))));
    let fast_cross = problem(&g, |x| [0.0, 3.0 * (PI * x[1]).sin()], |_| 0.0, |_| 0.0);
    assert!(matches!(march(&fast_cross, &g), Err(NsfError::MarchingCfl { .. })));
}

#[test]
fn slice_norm_examples() {
    let g = channel_grid(64).unwrap();
    let x1 = ScalarField::from_fn(&g, |_, x| x[0]);
    assert!((sup_slice_l2(&g, &x1) - 2.0).abs() < 1e-12);
    let s = ScalarField::from_fn(&g, |_, x| (PI * x[1]).sin());
    assert!((sup_slice_l2(&g, &s) - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(sup_slice_l2(&g, &ScalarField::zeros(&g)), 0.0);
}

#[test]
fn transport_estimate_over_random_samples() {
    let g = channel_grid(32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1729);
    let mut ratios = Vec::new();
    for _ in 0..50 {
        let c: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let eps = 0.2 * rng.gen_range(0.0..1.0);
        let p = problem(
            &g,
            |x| [eps * c[0] * x[1], eps * (PI * x[1]).sin() * (c[1] + c[2] * x[0])],
            |x| c[3] + c[4] * (3.0 * x[0] * x[1]).sin(),
            |x| c[5] + c[6] * (PI * x[1]).cos() + c[7] * x[1],
        );
        let w = march(&p, &g).unwrap();
        let w_in = ScalarField::from_fn(&g, |n, _| if n < p.inflow.len() { p.inflow[n] } else { 0.0 });
        let data = nsf::norms::slice_l2(&g, &w_in, 0) + nsf::norms::lp(&g, &p.source, 2.0);
        ratios.push(sup_slice_l2(&g, &w) / data);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    assert!(max <= 3.0, "C = {max}");
    assert!(max <= 10.0 * median);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = channel_grid(32).unwrap();
    let p = problem(&g, generic_velocity, |x| x[0] + x[1], |x| x[1] * x[1]);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            (march(&p, &g).unwrap(), characteristic(&p, &g))
        })
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn marching_preserves_positivity(a in 0.0f64..2.0, b in 0.0f64..2.0, eps in -0.3f64..0.3) {
        let g = channel_grid(16).unwrap();
        let p = problem(&g, |x| [eps * x[1], eps * (PI * x[1]).sin()], |x| a * (x[0] * x[1]).sin().abs(), |x| b * x[1] * x[1]);
        let w = march(&p, &g).unwrap();
        prop_assert!(w.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn marching_is_linear_in_the_source(a in -2.0f64..2.0, b in -2.0f64..2.0, eps in -0.3f64..0.3) {
        let g = channel_grid(16).unwrap();
        let u = |x: [f64; 3]| [eps * x[1], eps * (PI * x[1]).sin()];
        let h1 = |x: [f64; 3]| (x[0] * x[1]).cos();
        let h2 = |x: [f64; 3]| x[0] - x[1];
        let s1 = march(&problem(&g, u, h1, |_| 0.0), &g).unwrap();
        let s2 = march(&problem(&g, u, h2, |_| 0.0), &g).unwrap();
        let s = march(&problem(&g, u, |x| a * h1(x) + b * h2(x), |_| 0.0), &g).unwrap();
        let combo = s1.scaled(a).add(&s2.scaled(b));
        prop_assert!(s.sub(&combo).max_abs() <= 1e-12 * (1.0 + combo.max_abs()));
    }
}
