//! Property tests for the discrete operators, solvers and design driver.

mod common;

use common::{
    max_abs_diff, random_faces, random_instance, random_permeability, random_profile, rng, CLASSES,
    MODELS,
};
use porous_adjoint::{
    classify_bvp, discrete_gradient, divergence, gradient, make_grid, optimize, residuals_darcy,
    shift_pressure_datum, solve_adjoint, solve_darcy, total_dissipation_darcy, BodyForce,
    BoundaryCondition, BoundarySpec, BoundedMaterial, CellField, ClassTag, DarcyProblem, FaceField,
    FlowProblem, ModelForm, OptimizerOptions, Profile, Scenario, Sense, Side,
};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn model_strategy() -> impl Strategy<Value = ModelForm> {
    prop::sample::select(MODELS.to_vec())
}

fn class_strategy() -> impl Strategy<Value = ClassTag> {
    prop::sample::select(CLASSES.to_vec())
}

fn add(a: &Profile, b: &Profile, n: usize) -> Profile {
    Profile::Values(
        (0..n)
            .map(|m| a.face_value(m, n) + b.face_value(m, n))
            .collect(),
    )
}

/// Random boundary data with a fixed layout of loaded and velocity sides.
fn random_bc(
    r: &mut ChaCha8Rng,
    grid: &porous_adjoint::StaggeredGrid,
    model: ModelForm,
    mask: u8,
) -> BoundarySpec {
    let mut bc = BoundarySpec::uniform(BoundaryCondition::wall());
    for (bit, side) in Side::ALL.into_iter().enumerate() {
        let n = grid.side_len(side);
        let loaded = mask & (1 << bit) != 0;
        *bc.get_mut(side) = match (model, loaded) {
            (ModelForm::BrinkmanTraction, true) => BoundaryCondition::Traction {
                normal: random_profile(r, n),
                tangential: random_profile(r, n),
            },
            (_, true) => BoundaryCondition::Pressure {
                pressure: random_profile(r, n),
                tangential: random_profile(r, n),
            },
            (ModelForm::Darcy, false) => BoundaryCondition::NormalVelocity {
                normal: random_profile(r, n),
            },
            (_, false) => BoundaryCondition::FullVelocity {
                normal: random_profile(r, n),
                tangential: random_profile(r, n),
            },
        };
    }
    bc
}

fn sum_bc(
    grid: &porous_adjoint::StaggeredGrid,
    a: &BoundarySpec,
    b: &BoundarySpec,
) -> BoundarySpec {
    let mut out = a.clone();
    for side in Side::ALL {
        let n = grid.side_len(side);
        *out.get_mut(side) = match (a.get(side), b.get(side)) {
            (
                BoundaryCondition::Pressure {
                    pressure: p,
                    tangential: t,
                },
                BoundaryCondition::Pressure {
                    pressure: q,
                    tangential: s,
                },
            ) => BoundaryCondition::Pressure {
                pressure: add(p, q, n),
                tangential: add(t, s, n),
            },
            (
                BoundaryCondition::Traction {
                    normal: p,
                    tangential: t,
                },
                BoundaryCondition::Traction {
                    normal: q,
                    tangential: s,
                },
            ) => BoundaryCondition::Traction {
                normal: add(p, q, n),
                tangential: add(t, s, n),
            },
            (
                BoundaryCondition::NormalVelocity { normal: p },
                BoundaryCondition::NormalVelocity { normal: q },
            ) => BoundaryCondition::NormalVelocity {
                normal: add(p, q, n),
            },
            (
                BoundaryCondition::FullVelocity {
                    normal: p,
                    tangential: t,
                },
                BoundaryCondition::FullVelocity {
                    normal: q,
                    tangential: s,
                },
            ) => BoundaryCondition::FullVelocity {
                normal: add(p, q, n),
                tangential: add(t, s, n),
            },
            _ => unreachable!("layouts differ"),
        };
    }
    out
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn divergence_theorem(seed in any::<u64>(), nx in 1usize..9, ny in 1usize..9) {
        let mut r = rng(seed);
        let g = make_grid(nx, ny, r.gen_range(0.2..3.0), r.gen_range(0.2..3.0)).unwrap();
        let v = random_faces(&mut r, &g);
        let total: f64 = divergence(&g, &v).unwrap().values.iter().sum::<f64>() * g.cell_area();
        let mut flux = 0.0;
        for j in 0..ny {
            flux += (v.x[g.xface(nx, j)] - v.x[g.xface(0, j)]) * g.hy;
        }
        for i in 0..nx {
            flux += (v.y[g.yface(i, ny)] - v.y[g.yface(i, 0)]) * g.hx;
        }
        prop_assert!((total - flux).abs() <= 1e-12 * scale_of(&[total, flux]));
    }

    #[test]
    fn gradient_is_minus_divergence_adjoint(seed in any::<u64>(), nx in 1usize..9, ny in 1usize..9) {
        let mut r = rng(seed);
        let g = make_grid(nx, ny, r.gen_range(0.2..3.0), r.gen_range(0.2..3.0)).unwrap();
        let p = CellField::new((0..g.n_cells()).map(|_| r.gen_range(-1.0..1.0)).collect());
        let mut v = random_faces(&mut r, &g);
        for j in 0..ny {
            v.x[g.xface(0, j)] = 0.0;
            v.x[g.xface(nx, j)] = 0.0;
        }
        for i in 0..nx {
            v.y[g.yface(i, 0)] = 0.0;
            v.y[g.yface(i, ny)] = 0.0;
        }
        let walls = BoundarySpec::uniform(BoundaryCondition::wall());
        let gp = gradient(&g, &p, &walls).unwrap().values;
        let lhs: f64 = gp.x.iter().zip(&v.x).map(|(a, b)| a * b).sum::<f64>() * g.cell_area()
            + gp.y.iter().zip(&v.y).map(|(a, b)| a * b).sum::<f64>() * g.cell_area();
        let div = divergence(&g, &v).unwrap();
        let rhs: f64 = -p.values.iter().zip(&div.values).map(|(a, b)| a * b).sum::<f64>() * g.cell_area();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale_of(&[lhs, rhs]));
    }

    #[test]
    fn darcy_reproduces_affine_pressure(seed in any::<u64>(), nx in 1usize..10, ny in 1usize..10) {
        let mut r = rng(seed);
        let g = make_grid(nx, ny, r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let (a, b, c) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let kval = r.gen_range(0.1..10.0);
        let mu = r.gen_range(0.5..2.0);
        let p = |x: f64, y: f64| a + b * x + c * y;
        let side = |s: Side| {
            let n = g.side_len(s);
            Profile::Values((0..n).map(|m| {
                let t = g.side_face_coord(s, m);
                match s {
                    Side::Left => p(0.0, t),
                    Side::Right => p(g.lx, t),
                    Side::Bottom => p(t, 0.0),
                    Side::Top => p(t, g.ly),
                }
            }).collect())
        };
        let pressure = |s: Side| BoundaryCondition::Pressure { pressure: side(s), tangential: Profile::Constant(0.0) };
        let bc = BoundarySpec { left: pressure(Side::Left), right: pressure(Side::Right), bottom: pressure(Side::Bottom), top: pressure(Side::Top) };
        let sol = solve_darcy(&DarcyProblem::new(g, CellField::constant(&g, kval), mu, bc)).unwrap();
        let exact = CellField::from_fn(&g, p);
        prop_assert!(max_abs_diff(&sol.p.values, &exact.values) <= 1e-11);
        prop_assert!(sol.v.x.iter().all(|v| (v + kval / mu * b).abs() <= 1e-10));
        prop_assert!(sol.v.y.iter().all(|v| (v + kval / mu * c).abs() <= 1e-10));
    }

    #[test]
    fn solutions_superpose(seed in any::<u64>(), model in model_strategy(), mask in 1u8..16) {
        let mut r = rng(seed);
        let g = make_grid(r.gen_range(2..7), r.gen_range(2..7), r.gen_range(0.5..2.0), r.gen_range(0.5..2.0)).unwrap();
        let k = random_permeability(&mut r, &g);
        let bc1 = random_bc(&mut r, &g, model, mask);
        let bc2 = random_bc(&mut r, &g, model, mask);
        let f1 = random_faces(&mut r, &g);
        let f2 = random_faces(&mut r, &g);
        let f12 = FaceField::new(
            f1.x.iter().zip(&f2.x).map(|(a, b)| a + b).collect(),
            f1.y.iter().zip(&f2.y).map(|(a, b)| a + b).collect(),
        );
        let solve = |bc: BoundarySpec, f: FaceField| {
            common::build(model, g, k.clone(), 1.3, bc, BodyForce::Vector(f)).solve().unwrap()
        };
        let s1 = solve(bc1.clone(), f1);
        let s2 = solve(bc2.clone(), f2);
        let s12 = solve(sum_bc(&g, &bc1, &bc2), f12);
        let vsum: Vec<f64> = s1.v.x.iter().chain(&s1.v.y).zip(s2.v.x.iter().chain(&s2.v.y)).map(|(a, b)| a + b).collect();
        let v12: Vec<f64> = s12.v.x.iter().chain(&s12.v.y).copied().collect();
        let psum: Vec<f64> = s1.p.values.iter().zip(&s2.p.values).map(|(a, b)| a + b).collect();
        let tol = 1e-9 * scale_of(&v12).max(scale_of(&s12.p.values));
        prop_assert!(max_abs_diff(&vsum, &v12) <= tol);
        prop_assert!(max_abs_diff(&psum, &s12.p.values) <= tol);
    }

    #[test]
    fn darcy_permeability_scaling(seed in any::<u64>(), c in 0.1f64..10.0) {
        // pressure-driven data scales the velocity with k; velocity-driven data scales the pressure with 1/k
        let mut r = rng(seed);
        let unforced = |pb: FlowProblem| match pb {
            FlowProblem::Darcy(p) => FlowProblem::Darcy(p.with_body_force(BodyForce::None)),
            _ => unreachable!(),
        };
        let pressure_driven = unforced(random_instance(&mut r, ModelForm::Darcy, ClassTag::B, 5, 4));
        let a = pressure_driven.solve().unwrap();
        let b = pressure_driven.with_permeability(pressure_driven.k().scaled(c)).solve().unwrap();
        prop_assert!(a.v.scaled(c).max_diff(&b.v) <= 1e-10 * scale_of(&b.v.x).max(scale_of(&b.v.y)));
        prop_assert!(max_abs_diff(&a.p.values, &b.p.values) <= 1e-10 * scale_of(&a.p.values));

        let velocity_driven = unforced(random_instance(&mut r, ModelForm::Darcy, ClassTag::C, 5, 4));
        let a = velocity_driven.solve().unwrap();
        let b = velocity_driven.with_permeability(velocity_driven.k().scaled(c)).solve().unwrap();
        prop_assert!(a.v.max_diff(&b.v) <= 1e-10 * scale_of(&a.v.x));
        prop_assert!(max_abs_diff(&a.p.scaled(1.0 / c).values, &b.p.values) <= 1e-10 * scale_of(&a.p.values) / c.min(1.0));
    }

    #[test]
    fn converged_darcy_solutions_have_small_residuals(seed in any::<u64>(), class in class_strategy()) {
        let mut r = rng(seed);
        let (nx, ny) = (r.gen_range(2..9), r.gen_range(2..9));
        let pb = random_instance(&mut r, ModelForm::Darcy, class, nx, ny);
        let FlowProblem::Darcy(pb) = pb else { unreachable!() };
        let sol = solve_darcy(&pb).unwrap();
        let (m, c) = residuals_darcy(&pb, &sol).unwrap();
        prop_assert!(m.max_abs() <= 1e-10 && c.max_abs() <= 1e-10);
        if sol.diagnostics.gauge_pinned {
            prop_assert!(sol.p.mean().abs() <= 1e-12);
        }
    }

    #[test]
    fn solutions_and_adjoints_are_divergence_free(seed in any::<u64>(), model in model_strategy(), class in class_strategy()) {
        let mut r = rng(seed);
        let pb = random_instance(&mut r, model, class, 6, 5);
        let fwd = pb.solve().unwrap();
        let adj = solve_adjoint(&pb, &fwd).unwrap();
        let g = pb.grid();
        prop_assert!(divergence(g, &fwd.v).unwrap().max_abs() <= 1e-8);
        prop_assert!(divergence(g, &adj.lambda_v).unwrap().max_abs() <= 1e-8);
    }

    #[test]
    fn sensitivity_sign_follows_class(seed in any::<u64>(), model in model_strategy(), class in class_strategy()) {
        let mut r = rng(seed);
        let pb = random_instance(&mut r, model, class, 6, 5);
        let fwd = pb.solve().unwrap();
        let g = discrete_gradient(&pb, &fwd).unwrap();
        if class.is_pressure_driven() {
            prop_assert!(g.values.iter().all(|x| *x >= -1e-12));
        } else {
            prop_assert!(g.values.iter().all(|x| *x <= 1e-12));
        }
    }

    #[test]
    fn dissipation_is_linear_in_inverse_permeability(seed in any::<u64>(), c in 0.1f64..10.0) {
        let mut r = rng(seed);
        let g = make_grid(r.gen_range(1..8), r.gen_range(1..8), 1.0, 1.0).unwrap();
        let k = random_permeability(&mut r, &g);
        let v = random_faces(&mut r, &g);
        let a = total_dissipation_darcy(&g, &k, 1.0, &v).unwrap();
        let b = total_dissipation_darcy(&g, &k.scaled(c), 1.0, &v).unwrap();
        prop_assert!((a / c - b).abs() <= 1e-12 * a.abs());
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn datum_shift_preserves_velocity(seed in any::<u64>(), level in -5.0f64..5.0, model in model_strategy()) {
        let mut r = rng(seed);
        let mut pb = random_instance(&mut r, model, ClassTag::D, 6, 5);
        let mut bc = pb.bc().clone();
        for side in Side::ALL {
            match bc.get_mut(side) {
                BoundaryCondition::Pressure { pressure, .. } => *pressure = Profile::Constant(level),
                BoundaryCondition::Traction { normal, .. } => *normal = Profile::Constant(-level),
                _ => {}
            }
        }
        pb = pb.with_bc(bc);
        let shifted = shift_pressure_datum(&pb).unwrap();
        prop_assert!((shifted.shift - level).abs() <= 1e-14);
        prop_assert_eq!(classify_bvp(&shifted.problem).unwrap().tag, ClassTag::D);
        let a = pb.solve().unwrap();
        let b = shifted.problem.solve().unwrap();
        let restored = shifted.restore_pressure(&b.p);
        prop_assert!(a.v.max_diff(&b.v) <= 1e-10);
        prop_assert!(max_abs_diff(&a.p.values, &restored.values) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, .. ProptestConfig::default() })]

    #[test]
    fn design_iterates_stay_feasible_and_improve(
        f in 0.1f64..0.9,
        maximize in any::<bool>(),
        high in any::<bool>(),
        velocity_driven in any::<bool>(),
    ) {
        let pb = if velocity_driven { porous_adjoint::canonical_cd(8) } else { porous_adjoint::canonical_ab(8) }.unwrap();
        let sense = if maximize { Sense::Maximize } else { Sense::Minimize };
        let bound = if high { BoundedMaterial::HighPermeability } else { BoundedMaterial::LowPermeability };
        let scenario = Scenario::new(sense, bound, f);
        let state = optimize(&pb, &scenario, &OptimizerOptions { max_iters: 30, ..OptimizerOptions::default() }).unwrap();
        prop_assert!(state.bounded_fraction <= f + 1e-10);
        let sign = if maximize { 1.0 } else { -1.0 };
        for w in state.history.windows(2) {
            prop_assert!(sign * (w[1] - w[0]) >= -1e-12 * w[0].abs());
        }
        prop_assert!(state.gamma.gamma.values.iter().all(|g| (0.0..=1.0).contains(g)));
    }
}
