//! Total dissipation rate, its sensitivity to permeability, and the
//! verification paths for that sensitivity.
//!
//! The drag dissipation of a cell is `(mu / k_c) |v|^2_c A` with
//! `|v|^2_c = (v_W^2 + v_E^2)/2 + (v_S^2 + v_N^2)/2`. Summed over cells this
//! equals `sum_f vol_f (mu / k_f) v_f^2` with harmonic face permeability, which
//! is the energy the solvers minimise. The discrete sign results hold exactly
//! for this closure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjoint::{solve_adjoint_brinkman, solve_adjoint_darcy, AdjointSolution};
use crate::boundary::BoundarySpec;
use crate::error::Result;
use crate::grid::{check_permeability, CellField, FaceField, StaggeredGrid};
use crate::linalg::Factorization;
use crate::problem::{FlowProblem, FlowSolution};
use crate::system::{assemble, face_cells, face_get, face_volumes, MixedInput};
use crate::viscous::{half_energy_gradient, strain_energy};

/// Darcy total dissipation rate `sum_c (mu / k_c) |v|^2_c A`.
pub fn total_dissipation_darcy(
    grid: &StaggeredGrid,
    k: &CellField,
    mu: f64,
    v: &FaceField,
) -> Result<f64> {
    check_permeability(grid, k)?;
    grid.check_faces(v, "total_dissipation velocity")?;
    let area = grid.cell_area();
    let mut total = 0.0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let sq = 0.5 * (v.x[grid.xface(i, j)].powi(2) + v.x[grid.xface(i + 1, j)].powi(2))
                + 0.5 * (v.y[grid.yface(i, j)].powi(2) + v.y[grid.yface(i, j + 1)].powi(2));
            total += mu / k.values[grid.cell(i, j)] * sq * area;
        }
    }
    Ok(total)
}

/// Darcy-Brinkman total dissipation: the drag part plus the viscous energy
/// `int 2 mu D[v] : D[v]` on the staggered grid. Shear strains across the
/// boundary use the ghost rules of `bc`, or linear extrapolation without one.
pub fn total_dissipation_brinkman(
    grid: &StaggeredGrid,
    k: &CellField,
    mu: f64,
    v: &FaceField,
    bc: Option<&BoundarySpec>,
) -> Result<f64> {
    let drag = total_dissipation_darcy(grid, k, mu, v)?;
    Ok(drag + strain_energy(grid, mu, v, bc))
}

/// Cellwise sensitivity density `mu / k^2 v . (2 Lambda - v)` in
/// dissipation rate per unit permeability and area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityField {
    pub grid: StaggeredGrid,
    pub density: CellField,
}

impl SensitivityField {
    /// Sensitivity per cell, `density * A`.
    pub fn per_cell(&self) -> CellField {
        self.density.scaled(self.grid.cell_area())
    }
}

/// Evaluates the continuous sensitivity formula with cell-centred velocities
/// (face components averaged to the centre).
pub fn sensitivity_field(
    grid: &StaggeredGrid,
    k: &CellField,
    mu: f64,
    v: &FaceField,
    adjoint: &AdjointSolution,
) -> Result<SensitivityField> {
    check_permeability(grid, k)?;
    grid.check_faces(v, "sensitivity velocity")?;
    grid.check_faces(&adjoint.lambda_v, "sensitivity adjoint velocity")?;
    let (u, w) = v.cell_centered(grid);
    let (lu, lw) = adjoint.lambda_v.cell_centered(grid);
    let density = (0..grid.n_cells())
        .map(|c| {
            let kc = k.values[c];
            mu / (kc * kc)
                * (u.values[c] * (2.0 * lu.values[c] - u.values[c])
                    + w.values[c] * (2.0 * lw.values[c] - w.values[c]))
        })
        .collect();
    Ok(SensitivityField {
        grid: *grid,
        density: CellField::new(density),
    })
}

/// `sum_c density_c dk_c A`.
pub fn directional_derivative(s: &SensitivityField, dk: &CellField) -> Result<f64> {
    s.grid
        .check_cells(dk, "directional_derivative perturbation")?;
    Ok(s.density
        .values
        .iter()
        .zip(&dk.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * s.grid.cell_area())
}

/// Numerical adjoint for either model.
pub fn solve_adjoint(problem: &FlowProblem, forward: &FlowSolution) -> Result<AdjointSolution> {
    match problem {
        FlowProblem::Darcy(p) => solve_adjoint_darcy(p, forward),
        FlowProblem::Brinkman(p) => solve_adjoint_brinkman(p, forward),
    }
}

/// Exact derivative `dPhi_h / dk_c` of the discrete objective.
///
/// Assembles the mixed velocity-pressure system `K x = r`, solves
/// `K^T eta = dPhi/dx`, and returns
/// `dPhi/dk_c = sum_f dM_f/dk_c (v_f^2 - eta_f v_f)` where `M_f` is the drag
/// mass of face `f`, differentiated through the harmonic mean.
pub fn discrete_gradient(problem: &FlowProblem, forward: &FlowSolution) -> Result<CellField> {
    problem.validate()?;
    let grid = problem.grid();
    grid.check_faces(&forward.v, "discrete_gradient velocity")?;
    let viscous = matches!(problem, FlowProblem::Brinkman(_));
    let force = problem.body_force().face_values(grid)?;
    let sys = assemble(&MixedInput {
        grid,
        k: problem.k(),
        mu: problem.mu(),
        bc: problem.bc(),
        force: &force,
        source: problem.source(),
        viscous,
        extra: None,
    })?;
    let layout = &sys.layout;
    let nxf = layout.nxf;
    let v = &forward.v;

    let mut dphi_dx = vec![0.0; layout.n()];
    let energy_grad =
        viscous.then(|| half_energy_gradient(grid, problem.mu(), v, Some(problem.bc())));
    for (f, d) in layout.face_dof.iter().enumerate() {
        if let Some(d) = d {
            let mut g = 2.0 * sys.mass[f] * face_get(v, f, nxf);
            if let Some(eg) = &energy_grad {
                g += 2.0 * face_get(eg, f, nxf);
            }
            dphi_dx[*d] = g;
        }
    }
    let fac = Factorization::new(sys.matrix)?;
    let (eta, _) = fac.solve(&dphi_dx, problem.solver().tolerance, true)?;

    let mu = problem.mu();
    let k = problem.k();
    let vol = face_volumes(grid);
    let cells = face_cells(grid);
    let mut out = vec![0.0; grid.n_cells()];
    for f in 0..grid.n_faces() {
        let vf = face_get(v, f, nxf);
        let weight = vf * vf - layout.face_dof[f].map_or(0.0, |d| eta[d] * vf);
        let share = if cells[f].len() == 2 { 0.5 } else { 1.0 };
        for &(c, _) in &cells[f] {
            let kc = k.values[c];
            out[c] += -vol[f] * mu * share / (kc * kc) * weight;
        }
    }
    Ok(CellField::new(out))
}

/// Central finite differences of `objective` with respect to each entry of
/// `k`, step `max(k_c, 1) eps^(1/3)` (shrunk to `k_c eps^(1/3)` if the step
/// would leave the positive half-line). Perturbations run in parallel.
pub fn fd_gradient<F>(k: &CellField, objective: F) -> Result<CellField>
where
    F: Fn(&CellField) -> Result<f64> + Sync,
{
    let scale = f64::EPSILON.cbrt();
    let values: Result<Vec<f64>> = (0..k.len())
        .into_par_iter()
        .map(|c| {
            let kc = k.values[c];
            let mut eps = kc.abs().max(1.0) * scale;
            if kc - eps <= 0.0 {
                eps = kc.abs() * scale;
            }
            let mut plus = k.clone();
            plus.values[c] += eps;
            let mut minus = k.clone();
            minus.values[c] -= eps;
            Ok((objective(&plus)? - objective(&minus)?) / (2.0 * eps))
        })
        .collect();
    Ok(CellField::new(values?))
}

/// Finite-difference gradient of the total dissipation rate of `problem`.
pub fn fd_dissipation_gradient(problem: &FlowProblem) -> Result<CellField> {
    fd_gradient(problem.k(), |k| {
        let pb = problem.with_permeability(k.clone());
        let sol = pb.solve()?;
        pb.dissipation(&sol.v)
    })
}

/// `max |a - b| / max |b|`, or the absolute difference when `b` vanishes.
pub fn relative_max_error(a: &CellField, b: &CellField) -> f64 {
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.max_abs();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// The three gradient paths side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    /// Continuous formula with the numerical adjoint, per cell.
    pub adjoint_gradient: CellField,
    /// Exact derivative of the discrete objective.
    pub discrete_gradient: CellField,
    /// Central finite differences, when requested.
    pub fd_gradient: Option<CellField>,
    pub adjoint_vs_discrete: f64,
    pub discrete_vs_fd: Option<f64>,
    pub adjoint_vs_fd: Option<f64>,
}

pub fn gradient_report(problem: &FlowProblem, with_fd: bool) -> Result<GradientReport> {
    let forward = problem.solve()?;
    let adjoint = solve_adjoint(problem, &forward)?;
    let s = sensitivity_field(
        problem.grid(),
        problem.k(),
        problem.mu(),
        &forward.v,
        &adjoint,
    )?;
    let adjoint_gradient = s.per_cell();
    let discrete = discrete_gradient(problem, &forward)?;
    let fd = if with_fd {
        Some(fd_dissipation_gradient(problem)?)
    } else {
        None
    };
    Ok(GradientReport {
        adjoint_vs_discrete: relative_max_error(&adjoint_gradient, &discrete),
        discrete_vs_fd: fd.as_ref().map(|fd| relative_max_error(&discrete, fd)),
        adjoint_vs_fd: fd
            .as_ref()
            .map(|fd| relative_max_error(&adjoint_gradient, fd)),
        adjoint_gradient,
        discrete_gradient: discrete,
        fd_gradient: fd,
    })
}
