//! Random class A-D problems for verification runs.

use rand::Rng;

use crate::boundary::{BoundaryCondition, BoundarySpec, Profile, Side};
use crate::classify::ClassTag;
use crate::grid::{make_grid, CellField, FaceField, StaggeredGrid};
use crate::problem::{
    BodyForce, BrinkmanForm, BrinkmanProblem, DarcyProblem, FlowProblem, ModelForm,
};

pub const MODELS: [ModelForm; 3] = [
    ModelForm::Darcy,
    ModelForm::BrinkmanMain,
    ModelForm::BrinkmanTraction,
];
pub const CLASSES: [ClassTag; 4] = [ClassTag::A, ClassTag::B, ClassTag::C, ClassTag::D];

/// Face-centred values uniform in `[-1, 1)`.
pub fn random_profile<R: Rng>(rng: &mut R, n: usize) -> Profile {
    Profile::Values((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

/// Log-uniform permeability in `[0.2, 5]`.
pub fn random_permeability<R: Rng>(rng: &mut R, grid: &StaggeredGrid) -> CellField {
    CellField::new(
        (0..grid.n_cells())
            .map(|_| rng.gen_range(0.2f64.ln()..5.0f64.ln()).exp())
            .collect(),
    )
}

pub fn random_faces<R: Rng>(rng: &mut R, grid: &StaggeredGrid) -> FaceField {
    FaceField::new(
        (0..grid.n_xfaces())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
        (0..grid.n_yfaces())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect(),
    )
}

fn data<R: Rng>(rng: &mut R, n: usize, homogeneous: bool) -> Profile {
    if homogeneous {
        Profile::Constant(0.0)
    } else {
        random_profile(rng, n)
    }
}

fn loaded<R: Rng>(rng: &mut R, model: ModelForm, n: usize, homogeneous: bool) -> BoundaryCondition {
    match model {
        ModelForm::Darcy | ModelForm::BrinkmanMain => BoundaryCondition::Pressure {
            pressure: data(rng, n, homogeneous),
            tangential: Profile::Constant(0.0),
        },
        ModelForm::BrinkmanTraction => BoundaryCondition::Traction {
            normal: data(rng, n, homogeneous),
            tangential: data(rng, n, homogeneous),
        },
    }
}

fn velocity<R: Rng>(
    rng: &mut R,
    model: ModelForm,
    n: usize,
    homogeneous: bool,
) -> BoundaryCondition {
    match model {
        ModelForm::Darcy => BoundaryCondition::NormalVelocity {
            normal: data(rng, n, homogeneous),
        },
        _ => BoundaryCondition::FullVelocity {
            normal: data(rng, n, homogeneous),
            tangential: data(rng, n, homogeneous),
        },
    }
}

/// Removes the net outward flux by shifting the normal data on the left side.
fn balance(grid: &StaggeredGrid, bc: &mut BoundarySpec) {
    let shift = -bc.prescribed_flux(grid) / grid.ly;
    if let BoundaryCondition::NormalVelocity { normal }
    | BoundaryCondition::FullVelocity { normal, .. } = &mut bc.left
    {
        *normal = normal.shifted(shift);
    }
}

/// A random problem of the requested model and class on an `nx x ny` grid
/// with random extents, viscosity, permeability and data.
///
/// Class A loads every side, class C none; B and D load a random proper
/// subset. B gets zero velocity data and a random vector force, C balanced
/// velocity data and a random potential force, D zero loads and no force.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    model: ModelForm,
    class: ClassTag,
    nx: usize,
    ny: usize,
) -> FlowProblem {
    let grid = make_grid(nx, ny, rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0))
        .expect("positive extents");
    let k = random_permeability(rng, &grid);
    let mu = rng.gen_range(0.5..2.0);
    let mask: u8 = match class {
        ClassTag::A => 0b1111,
        ClassTag::C => 0,
        _ => rng.gen_range(1..15),
    };
    let mut bc = BoundarySpec::uniform(BoundaryCondition::wall());
    for (bit, side) in Side::ALL.into_iter().enumerate() {
        let n = grid.side_len(side);
        *bc.get_mut(side) = if mask & (1 << bit) != 0 {
            loaded(rng, model, n, class == ClassTag::D)
        } else {
            velocity(rng, model, n, class == ClassTag::B)
        };
    }
    let force = match class {
        ClassTag::A | ClassTag::B | ClassTag::General => {
            BodyForce::Vector(random_faces(rng, &grid))
        }
        ClassTag::C => {
            balance(&grid, &mut bc);
            BodyForce::Potential(CellField::new(
                (0..grid.n_cells())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect(),
            ))
        }
        ClassTag::D => BodyForce::None,
    };
    build_problem(model, grid, k, mu, bc, force)
}

pub fn build_problem(
    model: ModelForm,
    grid: StaggeredGrid,
    k: CellField,
    mu: f64,
    bc: BoundarySpec,
    force: BodyForce,
) -> FlowProblem {
    match model {
        ModelForm::Darcy => DarcyProblem::new(grid, k, mu, bc)
            .with_body_force(force)
            .into(),
        ModelForm::BrinkmanMain => BrinkmanProblem::new(grid, k, mu, bc, BrinkmanForm::Main)
            .with_body_force(force)
            .into(),
        ModelForm::BrinkmanTraction => {
            BrinkmanProblem::new(grid, k, mu, bc, BrinkmanForm::Traction)
                .with_body_force(force)
                .into()
        }
    }
}
