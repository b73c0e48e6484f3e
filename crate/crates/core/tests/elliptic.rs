use std::f64::consts::PI;

use nsf::elliptic::*;
use nsf::grid::{mirror_scalar_across_outflow, mirror_vector_across_outflow};
use nsf::manufactured::*;
use nsf::stencil::{ScalarBc, Stencils};
use nsf::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RESOLUTIONS: [usize; 3] = [16, 32, 64];

fn order_of(case: impl Fn(&Grid) -> f64) -> f64 {
    let mut hs = Vec::new();
    let mut es = Vec::new();
    for n in RESOLUTIONS {
        let g = channel_grid(n).unwrap();
        hs.push(g.h(0));
        es.push(case(&g));
    }
    fit_order(&hs, &es)
}

#[test]
fn neumann_constant_solution() {
    let g = channel_grid(16).unwrap();
    let p = NeumannProblem { rhs: ScalarField::zeros(&g), flux: BoundaryField::zeros(&g), mean: 5.0 };
    let sol = solve_neumann(&p, &g).unwrap();
    assert!(sol.u.values().iter().all(|v| (v - 5.0).abs() < 1e-12));
    assert!(sol.projection.abs() < 1e-14);
}

#[test]
fn neumann_manufactured_order() {
    let order = order_of(|g| neumann_case(g).unwrap());
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
}

#[test]
fn neumann_compatible_pair_residual_and_mean() {
    let g = channel_grid(16).unwrap();
    // f = 1/|Ω| and unit flux through Γ_out only: ∫f = 1 = ∫_Γ d
    let rhs = ScalarField::constant(&g, 1.0 / g.domain().volume());
    let flux = BoundaryField::on_patch(&g, Patch::Outflow, |_| 1.0);
    let p = NeumannProblem { rhs: rhs.clone(), flux: flux.clone(), mean: -0.25 };
    let solver = NeumannSolver::new(&g).unwrap();
    let sol = solver.solve(&p, false).unwrap();
    assert!((sol.u.mean(&g) + 0.25).abs() < 1e-12);
    let st = Stencils::new(&g);
    let lap = st.laplacian_field(&sol.u, &ScalarBc::neumann(&g, &flux));
    assert!(lap.sub(&rhs).max_abs() < 1e-9);
}

#[test]
fn neumann_incompatible_data_without_projection_is_an_error() {
    let g = channel_grid(16).unwrap();
    let p = NeumannProblem { rhs: ScalarField::constant(&g, 1.0), flux: BoundaryField::zeros(&g), mean: 0.0 };
    let solver = NeumannSolver::new(&g).unwrap();
    assert!(matches!(solver.solve(&p, false), Err(NsfError::IncompatibleNeumann { .. })));
    let sol = solver.solve(&p, true).unwrap();
    assert!((sol.projection - 1.0).abs() < 1e-12);
}

#[test]
fn neumann_matches_symmetric_reflection_across_outflow() {
    let g = channel_grid(16).unwrap();
    let doubled = g.doubled_across_outflow().unwrap();
    let rhs = ScalarField::from_fn(&g, |_, x| (x[0] * x[1]).sin() + x[1] * x[1]);
    let flux = BoundaryField::from_fn(&g, |f, _, x| match f.patch() {
        Patch::Inflow => (PI * x[1]).cos(),
        Patch::Outflow => 0.0,
        Patch::Wall => 0.3 * x[0],
    });
    let direct = solve_neumann(&NeumannProblem { rhs: rhs.clone(), flux: flux.clone(), mean: 1.0 }, &g).unwrap();
    let mirrored_flux = BoundaryField::from_fn(&doubled, |f, n, _| {
        let src = g.fold_from_doubled(&doubled, n);
        let src_face = if f.axis == 0 { Face::INFLOW } else { f };
        flux.face(src_face)[g.face_position(src_face, src).unwrap()]
    });
    let reflected = solve_neumann(
        &NeumannProblem { rhs: mirror_scalar_across_outflow(&g, &doubled, &rhs), flux: mirrored_flux, mean: 1.0 },
        &doubled,
    )
    .unwrap();
    for n in 0..g.n_nodes() {
        let i = g.multi_index(n);
        let m = doubled.index(i);
        assert!((direct.u[n] - reflected.u[m]).abs() < 1e-10);
    }
}

#[test]
fn robin_homogeneous_data_give_zero() {
    let g = channel_grid(16).unwrap();
    let l: Vec<f64> = g.faces().map(|f| if f.patch() == Patch::Wall { 50.0 } else { 0.0 }).collect();
    let z = ScalarField::zeros(&g);
    let eta = solve_robin_temperature(&z, 1.0, &z, 50.0, &l, &g).unwrap();
    assert_eq!(eta.max_abs(), 0.0);
}

#[test]
fn robin_requires_some_heat_exchange() {
    let g = channel_grid(16).unwrap();
    assert!(RobinSolver::new(&g, 1.0, 1.0, &vec![0.0; 4]).is_err());
}

#[test]
fn robin_manufactured_order() {
    let order = order_of(|g| robin_case(g, 1.0, 50.0, 50.0).unwrap());
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
    let order = order_of(|g| robin_case(g, 1.5, 2.0, 3.0).unwrap());
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
}

#[test]
fn robin_solution_scales_like_inverse_kappa() {
    let g = channel_grid(16).unwrap();
    let rhs = ScalarField::from_fn(&g, |_, x| (PI * x[1]).cos() + x[0]);
    let run = |kappa: f64| {
        let l: Vec<f64> = g.faces().map(|f| if f.patch() == Patch::Wall { kappa } else { 0.0 }).collect();
        let z = ScalarField::zeros(&g);
        solve_robin_temperature(&rhs, 0.0, &z, kappa, &l, &g).unwrap().max_abs()
    };
    // with r0 = 0 and L proportional to κ the problem is exactly linear in 1/κ
    let ratio = run(50.0) / run(100.0);
    assert!((ratio - 2.0).abs() < 1e-10, "ratio {ratio}");
}

#[test]
fn lame_zero_data_give_zero() {
    let g = channel_grid(16).unwrap();
    let p = LameParams::uniform(&g, 1.0, 0.0, 0.0, 10.0);
    let u = LameSolver::new(&g, p).unwrap().solve(&LameProblem::zeros(&g));
    assert_eq!(u.max_abs(), 0.0);
}

#[test]
fn lame_manufactured_order() {
    for (lambda, conv, alpha) in [(0.0, 0.0, 10.0), (0.7, 1.0, 2.0)] {
        let order = order_of(|g| lame_case(g, &LameParams::uniform(g, 1.0, lambda, conv, alpha)).unwrap());
        assert!((order - 2.0).abs() <= 0.3, "order {order}");
    }
}

#[test]
fn lame_solution_is_tangent_to_every_face() {
    let g = channel_grid(16).unwrap();
    let params = LameParams::uniform(&g, 1.0, 0.0, 1.0, 10.0);
    let force = VectorField::from_fn(&g, |_, x| vec![1.0 + x[1], x[0] * x[1]]);
    let slip = vec![BoundaryField::from_fn(&g, |_, _, x| x[0] - x[1]); 2];
    let u = LameSolver::new(&g, params).unwrap().solve(&LameProblem { force, slip });
    for f in g.faces() {
        for &n in g.face_nodes(f) {
            assert!(u[f.axis][n].abs() < 1e-13);
        }
    }
}

#[test]
fn lame_estimate_ratio_is_stable_over_random_data() {
    let g = channel_grid(16).unwrap();
    let params = LameParams::uniform(&g, 1.0, 0.0, 0.0, 10.0);
    let solver = LameSolver::new(&g, params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1729);
    let mut ratios = Vec::new();
    for _ in 0..10 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let force = VectorField::from_fn(&g, |_, x| {
            vec![c[0] * (PI * x[1]).sin() + c[1] * x[0], c[2] * (x[0] * x[1]).cos()]
        });
        let slip = vec![BoundaryField::from_fn(&g, |_, _, x| c[3] * x[0] + c[4] * x[1] + c[5]); 2];
        let data = force.max_abs() + slip.iter().map(|b| b.max_abs()).sum::<f64>();
        let u = solver.solve(&LameProblem { force, slip });
        ratios.push(nsf::norms::w2p(&g, &u.components()[0], 4.0) / data);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max.is_finite() && min > 0.0 && max / min < 100.0);
}

#[test]
fn lame_matches_antisymmetric_reflection_across_outflow() {
    // friction and slip data vanish on Γ_out so the odd extension is admissible;
    // the data below are odd (axial) and even (transverse) about x₁ = l
    let slip_of = |g: &Grid| {
        vec![
            BoundaryField::from_fn(g, |f, _, x| if f.axis == 1 { 0.1 * (PI * x[0] / 2.0).sin() } else { 0.0 }),
            // zero on the plane x₁ = 2, which is Γ_out of the short channel
            BoundaryField::from_fn(g, |f, _, x| {
                if f.axis == 0 && (x[0] - 2.0).abs() > 0.5 { 0.1 * (PI * x[1]).sin() } else { 0.0 }
            }),
        ]
    };
    let force_of = |g: &Grid| VectorField::from_fn(g, |_, x| vec![(PI * x[0] / 2.0).sin() * x[1], 1.0 + x[1] * x[1]]);
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [16, 32, 64] {
        let g = channel_grid(n).unwrap();
        let doubled = g.doubled_across_outflow().unwrap();
        let mut alpha = vec![5.0; 4];
        alpha[Face::OUTFLOW.id()] = 0.0;
        let p = LameParams { mu: 1.0, lambda: 0.0, convection: 0.0, alpha };
        let direct = LameSolver::new(&g, p).unwrap().solve(&LameProblem { force: force_of(&g), slip: slip_of(&g) });
        let pd = LameParams { mu: 1.0, lambda: 0.0, convection: 0.0, alpha: vec![5.0; 4] };
        let ext = LameSolver::new(&doubled, pd)
            .unwrap()
            .solve(&LameProblem { force: force_of(&doubled), slip: slip_of(&doubled) });
        assert!(mirror_vector_across_outflow(&g, &doubled, &force_of(&g)).sub(&force_of(&doubled)).max_abs() < 1e-12);
        let mut worst = 0.0f64;
        for n in 0..g.n_nodes() {
            let m = doubled.index(g.multi_index(n));
            for c in 0..2 {
                worst = worst.max((direct[c][n] - ext[c][m]).abs());
            }
        }
        hs.push(g.h(0));
        errs.push(worst);
    }
    assert!(errs[2] < 1e-3, "{errs:?}");
    assert!(fit_order(&hs, &errs) > 1.5, "{errs:?}");
}

#[test]
fn helmholtz_of_pure_gradient_and_pure_rotation() {
    let g = channel_grid(32).unwrap();
    let k = PI / 2.0;
    let grad = VectorField::from_fn(&g, |_, x| {
        vec![-k * (k * x[0]).sin() * (PI * x[1]).cos(), -PI * (k * x[0]).cos() * (PI * x[1]).sin()]
    });
    let parts = helmholtz_decompose(&grad, &g).unwrap();
    assert!(parts.solenoidal.max_abs() < 0.05 * grad.max_abs(), "{}", parts.solenoidal.max_abs());
    // stream function ψ = sin²(πx₁/2) sin²(πx₂): A = (∂₂ψ, −∂₁ψ) is divergence free and tangent
    let rot = VectorField::from_fn(&g, |_, x| {
        let (sx, cx) = (k * x[0]).sin_cos();
        let (sy, cy) = (PI * x[1]).sin_cos();
        vec![2.0 * PI * sx * sx * sy * cy, -2.0 * k * sx * cx * sy * sy]
    });
    let parts = helmholtz_decompose(&rot, &g).unwrap();
    assert!(parts.grad_phi.max_abs() < 0.05 * rot.max_abs(), "{}", parts.grad_phi.max_abs());
}

fn weighted_dot(g: &Grid, a: &VectorField, b: &VectorField) -> f64 {
    (0..g.dim()).map(|c| a[c].zip_map(&b[c], |x, y| x * y).integral(g)).sum()
}

#[test]
fn helmholtz_orthogonality_and_idempotence() {
    let g = channel_grid(32).unwrap();
    let solver = HelmholtzSolver::new(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1729);
    for _ in 0..5 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = VectorField::from_fn(&g, |_, x| {
            vec![c[0] + c[1] * x[1] * x[0] + c[2] * (3.0 * x[0]).sin(), c[3] * x[0] + c[4] * (2.0 * x[1]).cos() + c[5]]
        });
        let parts = solver.decompose(&u);
        let dot = weighted_dot(&g, &parts.grad_phi, &parts.solenoidal);
        let scale = weighted_dot(&g, &parts.grad_phi, &parts.grad_phi).sqrt()
            * weighted_dot(&g, &parts.solenoidal, &parts.solenoidal).sqrt();
        assert!(dot.abs() <= 1e-8 * scale.max(1e-300), "{dot} vs {scale}");
        assert!(parts.grad_phi.add(&parts.solenoidal).sub(&u).max_abs() < 1e-12);
        let again = solver.decompose(&parts.solenoidal);
        assert!(again.phi.max_abs() < 1e-9);
        assert!(again.solenoidal.sub(&parts.solenoidal).max_abs() < 1e-9);
    }
}

#[test]
fn vorticity_examples() {
    let g = channel_grid(16).unwrap();
    let shear = VectorField::from_fn(&g, |_, x| vec![x[1], 0.0]);
    let Vorticity::Planar(w) = vorticity(&shear, &g) else { panic!() };
    assert!(w.values().iter().all(|v| (v + 1.0).abs() < 1e-12));
    let grad = VectorField::from_fn(&g, |_, x| vec![2.0 * x[0] * x[1], x[0] * x[0]]);
    let Vorticity::Planar(w) = vorticity(&grad, &g) else { panic!() };
    assert!(w.max_abs() < 1e-12);
}

#[test]
fn lame_solution_satisfies_wall_vorticity_relation() {
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for n in [16, 32, 64] {
        let g = channel_grid(n).unwrap();
        let p = LameParams::uniform(&g, 1.0, 0.0, 1.0, 10.0);
        let force = VectorField::from_fn(&g, |_, x| vec![1.0 + x[1] * x[0], (x[0] * x[1]).sin()]);
        // slip data vanish at the corners, where the Dirichlet and Robin rules meet
        let slip = vec![
            BoundaryField::from_fn(&g, |_, _, x| 0.2 * (PI * x[0] / 2.0).sin()),
            BoundaryField::from_fn(&g, |_, _, x| 0.2 * (PI * x[1]).sin()),
        ];
        let u = LameSolver::new(&g, p).unwrap().solve(&LameProblem { force, slip: slip.clone() });
        hs.push(g.h(0));
        errs.push(wall_vorticity_defect(&u, &slip[0], 1.0, 10.0, &g));
    }
    assert!(fit_order(&hs, &errs) >= 0.9, "{errs:?}");
}
