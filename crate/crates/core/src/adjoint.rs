//! Adjoint problems for the total dissipation rate.
//!
//! The adjoint pair `(Lambda, lambda)` solves the forward operator with
//! homogeneous boundary data and a pseudo load built from the forward
//! velocity. For the four problem classes it is known in closed form.

use serde::{Deserialize, Serialize};

use crate::brinkman::solve_with_loads;
use crate::classify::ClassTag;
use crate::darcy::solve_darcy;
use crate::error::{Error, Result};
use crate::grid::{face_permeability, CellField, FaceField};
use crate::problem::{BodyForce, BrinkmanProblem, DarcyProblem, Diagnostics, FlowSolution};
use crate::viscous::half_energy_gradient;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjointSource {
    Numerical,
    AnalyticalClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointSolution {
    pub lambda_v: FaceField,
    pub lambda_p: CellField,
    pub source: AdjointSource,
    pub diagnostics: Diagnostics,
}

impl AdjointSolution {
    fn numerical(sol: FlowSolution) -> Self {
        Self {
            lambda_v: sol.v,
            lambda_p: sol.p,
            source: AdjointSource::Numerical,
            diagnostics: sol.diagnostics,
        }
    }
}

/// Darcy adjoint: the Darcy operator with body force `mu v / k_f` on every
/// face and homogeneous boundary data (`lambda = 0` on pressure sides,
/// `Lambda . n = 0` on velocity sides).
pub fn solve_adjoint_darcy(
    problem: &DarcyProblem,
    forward: &FlowSolution,
) -> Result<AdjointSolution> {
    let grid = &problem.grid;
    grid.check_faces(&forward.v, "forward velocity")?;
    let kf = face_permeability(grid, &problem.k)?;
    let mu = problem.mu;
    let force = FaceField::new(
        forward
            .v
            .x
            .iter()
            .zip(&kf.x)
            .map(|(v, k)| mu * v / k)
            .collect(),
        forward
            .v
            .y
            .iter()
            .zip(&kf.y)
            .map(|(v, k)| mu * v / k)
            .collect(),
    );
    let adj = DarcyProblem {
        body_force: BodyForce::Vector(force),
        bc: problem.bc.homogeneous(),
        source: None,
        ..problem.clone()
    };
    Ok(AdjointSolution::numerical(solve_darcy(&adj)?))
}

/// Darcy-Brinkman adjoint: the forward operator with homogeneous boundary
/// data, loaded by the discrete form of `mu v / k - div 2 mu D[v]` together
/// with the boundary stress `2 mu D[v] n` that the continuous statement puts
/// on loaded sides. Both come from the forward energy evaluated at `v`.
pub fn solve_adjoint_brinkman(
    problem: &BrinkmanProblem,
    forward: &FlowSolution,
) -> Result<AdjointSolution> {
    let grid = &problem.grid;
    grid.check_faces(&forward.v, "forward velocity")?;
    let kf = face_permeability(grid, &problem.k)?;
    let mu = problem.mu;
    let mut load = half_energy_gradient(grid, mu, &forward.v, Some(&problem.bc));
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let f = grid.xface(i, j);
            load.x[f] += grid.xface_volume(i) * mu / kf.x[f] * forward.v.x[f];
        }
    }
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let f = grid.yface(i, j);
            load.y[f] += grid.yface_volume(j) * mu / kf.y[f] * forward.v.y[f];
        }
    }
    let adj = BrinkmanProblem {
        body_force: BodyForce::None,
        bc: problem.bc.homogeneous(),
        source: None,
        ..problem.clone()
    };
    Ok(AdjointSolution::numerical(solve_with_loads(
        &adj,
        Some(&load),
    )?))
}

/// Closed-form adjoint of a class A-D problem:
/// A/B `(v, 0)`, C `(0, -p - psi)` in the mean-zero gauge, D `(0, -p)`.
pub fn analytical_adjoint(
    class: ClassTag,
    forward: &FlowSolution,
    psi: Option<&CellField>,
) -> Result<AdjointSolution> {
    let zero_v = || FaceField::new(vec![0.0; forward.v.x.len()], vec![0.0; forward.v.y.len()]);
    let (lambda_v, lambda_p) = match class {
        ClassTag::A | ClassTag::B => (
            forward.v.clone(),
            CellField::new(vec![0.0; forward.p.len()]),
        ),
        ClassTag::C => {
            let psi = psi.ok_or_else(|| {
                Error::Input("class C adjoint needs the body-force potential".into())
            })?;
            if psi.len() != forward.p.len() {
                return Err(Error::Shape(format!(
                    "potential has {} values, pressure has {}",
                    psi.len(),
                    forward.p.len()
                )));
            }
            let mut lam: Vec<f64> = forward
                .p
                .values
                .iter()
                .zip(&psi.values)
                .map(|(p, s)| -p - s)
                .collect();
            let mean = lam.iter().sum::<f64>() / lam.len() as f64;
            lam.iter_mut().for_each(|x| *x -= mean);
            (zero_v(), CellField::new(lam))
        }
        ClassTag::D => (zero_v(), forward.p.scaled(-1.0)),
        ClassTag::General => return Err(Error::NotAnalyticallySolvable("General".into())),
    };
    Ok(AdjointSolution {
        lambda_v,
        lambda_p,
        source: AdjointSource::AnalyticalClass,
        diagnostics: Diagnostics::default(),
    })
}
