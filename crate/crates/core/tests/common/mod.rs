//! Shared helpers for the integration tests.
#![allow(dead_code)]

pub mod limits;
pub mod manufactured;

#[allow(unused_imports)]
pub use porous_adjoint::instances::{
    build_problem as build, random_faces, random_instance, random_permeability, random_profile,
    CLASSES, MODELS,
};
use porous_adjoint::{
    make_grid, BodyForce, BoundaryCondition, BoundarySpec, CellField, ClassTag, FlowProblem,
    ModelForm, Profile, Side, StaggeredGrid,
};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn demeaned(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| x - m).collect()
}

fn negated(p: &Profile) -> Profile {
    match p {
        Profile::Constant(c) => Profile::Constant(-c),
        Profile::Values(v) => Profile::Values(v.iter().map(|x| -x).collect()),
    }
}

fn sampled(grid: &StaggeredGrid, side: Side, f: impl Fn(f64) -> f64) -> Profile {
    Profile::Values(
        (0..grid.side_len(side))
            .map(|m| f(grid.side_face_coord(side, m)))
            .collect(),
    )
}

/// Smooth class instance on the unit square with `n x n` cells, used to
/// measure convergence of the continuous sensitivity formula.
pub fn smooth_instance(model: ModelForm, class: ClassTag, n: usize) -> FlowProblem {
    use std::f64::consts::PI;
    let grid = make_grid(n, n, 1.0, 1.0).unwrap();
    let k = CellField::from_fn(&grid, |x, y| 1.0 + 0.3 * (2.0 * x + y).cos());
    let bump = |s: f64| (PI * s).sin();
    let pressure = |p: Profile| match model {
        ModelForm::BrinkmanTraction => BoundaryCondition::Traction {
            normal: negated(&p),
            tangential: Profile::Constant(0.0),
        },
        _ => BoundaryCondition::Pressure {
            pressure: p,
            tangential: Profile::Constant(0.0),
        },
    };
    let inflow = |p: Profile| match model {
        ModelForm::Darcy => BoundaryCondition::NormalVelocity { normal: p },
        _ => BoundaryCondition::FullVelocity {
            normal: p,
            tangential: Profile::Constant(0.0),
        },
    };
    let wall = match model {
        ModelForm::Darcy => BoundaryCondition::wall(),
        _ => BoundaryCondition::no_slip(),
    };
    let (bc, force) = match class {
        ClassTag::A => {
            let bc = BoundarySpec {
                left: pressure(sampled(&grid, Side::Left, |y| 1.0 + 0.2 * y)),
                right: pressure(sampled(&grid, Side::Right, |y| 0.3 * y * y)),
                bottom: pressure(sampled(&grid, Side::Bottom, |x| 1.0 - x)),
                top: pressure(sampled(&grid, Side::Top, |x| 1.2 * (1.0 - x) + 0.3 * x)),
            };
            (bc, BodyForce::uniform(&grid, 0.3, -0.2))
        }
        ClassTag::B => {
            let bc = BoundarySpec {
                left: pressure(sampled(&grid, Side::Left, |y| 1.0 + 0.2 * bump(y))),
                right: pressure(Profile::Constant(0.0)),
                bottom: wall.clone(),
                top: wall,
            };
            (bc, BodyForce::uniform(&grid, 0.3, -0.2))
        }
        ClassTag::C => {
            let bc = BoundarySpec {
                left: inflow(sampled(&grid, Side::Left, |y| -bump(y))),
                right: inflow(sampled(&grid, Side::Right, bump)),
                bottom: wall.clone(),
                top: wall,
            };
            (
                bc,
                BodyForce::Potential(CellField::from_fn(&grid, |x, y| 0.5 * x * y)),
            )
        }
        _ => {
            let bc = BoundarySpec {
                left: inflow(sampled(&grid, Side::Left, |y| -bump(y))),
                right: pressure(Profile::Constant(0.0)),
                bottom: wall.clone(),
                top: wall,
            };
            (bc, BodyForce::None)
        }
    };
    build(model, grid, k, 1.0, bc, force)
}
