//! Darcy-Brinkman solver on the staggered grid.
//!
//! The viscous term comes from the discrete strain energy in
//! [`crate::viscous`], so loaded sides receive the true normal stress
//! `-p + 2 mu n.D[v]n` and traction sides the full traction as natural
//! conditions. Tangential velocities enter through reflected ghost values.

use serde::{Deserialize, Serialize};

use crate::boundary::BcKind;
use crate::error::Result;
use crate::grid::{CellField, FaceField, StaggeredGrid};
use crate::linalg::{minres, Factorization, SolveStats};
use crate::problem::{validate_common, BrinkmanForm, BrinkmanProblem, Diagnostics, FlowSolution};
use crate::system::{assemble, check_compatible, Assembled, MixedInput};

pub(crate) fn validate(problem: &BrinkmanProblem) -> Result<()> {
    validate_common(
        &problem.grid,
        &problem.k,
        problem.mu,
        &problem.bc,
        problem.source.as_ref(),
    )?;
    match problem.form {
        BrinkmanForm::Main => problem.bc.require_kinds(
            &[BcKind::Pressure, BcKind::FullVelocity],
            "the Darcy-Brinkman main form",
        ),
        BrinkmanForm::Traction => problem.bc.require_kinds(
            &[BcKind::Traction, BcKind::FullVelocity],
            "the Darcy-Brinkman traction form",
        ),
    }
}

pub fn solve_brinkman(problem: &BrinkmanProblem) -> Result<FlowSolution> {
    solve_with_loads(problem, None)
}

/// Solves with additional integrated face loads on the free momentum rows.
pub(crate) fn solve_with_loads(
    problem: &BrinkmanProblem,
    extra: Option<&FaceField>,
) -> Result<FlowSolution> {
    validate(problem)?;
    let grid = &problem.grid;
    check_compatible(grid, &problem.bc, problem.source.as_ref())?;
    let force = problem.body_force.face_values(grid)?;
    let sys = assemble(&MixedInput {
        grid,
        k: &problem.k,
        mu: problem.mu,
        bc: &problem.bc,
        force: &force,
        source: problem.source.as_ref(),
        viscous: true,
        extra,
    })?;
    let (x, stats) = solve_mixed(&sys, problem)?;
    log::debug!(
        "brinkman {}x{}: residual {:.2e} after {} iterations",
        grid.nx,
        grid.ny,
        stats.residual,
        stats.iterations
    );
    Ok(FlowSolution {
        v: sys.layout.velocity(grid, &x),
        p: sys.layout.pressure(&x),
        diagnostics: Diagnostics {
            residual: stats.residual,
            iterations: stats.iterations,
            gauge_pinned: sys.layout.multiplier,
        },
    })
}

fn solve_mixed(sys: &Assembled, problem: &BrinkmanProblem) -> Result<(Vec<f64>, SolveStats)> {
    let tol = problem.solver.tolerance;
    if problem.solver.use_direct(problem.grid.n_cells()) {
        return Factorization::new(sys.matrix.clone())?.solve(&sys.rhs, tol, false);
    }
    // block-diagonal preconditioner: velocity diagonal, and for each
    // pressure the diagonal of the approximate Schur complement
    let diag = sys.matrix.diagonal();
    let layout = &sys.layout;
    let mut m_inv = vec![1.0; layout.n()];
    let mut schur = vec![0.0; layout.n_cells];
    for d in 0..layout.n_vel {
        m_inv[d] = 1.0 / diag[d];
    }
    for (r, d) in diag.iter().enumerate().take(layout.n_vel) {
        for k in sys.matrix.row_ptr[r]..sys.matrix.row_ptr[r + 1] {
            let c = sys.matrix.cols[k];
            if c >= layout.n_vel && c < layout.n_vel + layout.n_cells {
                schur[c - layout.n_vel] += sys.matrix.vals[k].powi(2) / d;
            }
        }
    }
    for (c, s) in schur.iter().enumerate() {
        m_inv[layout.p_dof(c)] = if *s > 0.0 { 1.0 / s } else { 1.0 };
    }
    if let Some(m) = layout.mult_dof() {
        m_inv[m] = 1.0;
    }
    let cap = problem.solver.max_iterations.unwrap_or(10 * layout.n());
    minres(&sys.matrix, &sys.rhs, &m_inv, tol, cap)
}

/// Cell-centred symmetric strain rate `D[v] = (grad v + grad v^T) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainRate {
    pub xx: CellField,
    pub xy: CellField,
    pub yy: CellField,
}

/// Normal strains from the staggered differences across each cell; shear
/// strains from central differences of the cell-averaged components, one-sided
/// next to the boundary.
pub fn strain_rate(grid: &StaggeredGrid, v: &FaceField) -> Result<StrainRate> {
    grid.check_faces(v, "strain_rate")?;
    let (uc, vc) = v.cell_centered(grid);
    let (nx, ny) = (grid.nx, grid.ny);
    let diff = |f: &CellField, i: usize, j: usize, along_x: bool| -> f64 {
        let (n, pos, h) = if along_x {
            (nx, i, grid.hx)
        } else {
            (ny, j, grid.hy)
        };
        if n == 1 {
            return 0.0;
        }
        let at = |q: usize| {
            if along_x {
                f.values[grid.cell(q, j)]
            } else {
                f.values[grid.cell(i, q)]
            }
        };
        if pos == 0 {
            (at(1) - at(0)) / h
        } else if pos == n - 1 {
            (at(n - 1) - at(n - 2)) / h
        } else {
            (at(pos + 1) - at(pos - 1)) / (2.0 * h)
        }
    };
    let mut xx = Vec::with_capacity(grid.n_cells());
    let mut xy = Vec::with_capacity(grid.n_cells());
    let mut yy = Vec::with_capacity(grid.n_cells());
    for j in 0..ny {
        for i in 0..nx {
            xx.push((v.x[grid.xface(i + 1, j)] - v.x[grid.xface(i, j)]) / grid.hx);
            yy.push((v.y[grid.yface(i, j + 1)] - v.y[grid.yface(i, j)]) / grid.hy);
            xy.push(0.5 * (diff(&uc, i, j, false) + diff(&vc, i, j, true)));
        }
    }
    Ok(StrainRate {
        xx: CellField::new(xx),
        xy: CellField::new(xy),
        yy: CellField::new(yy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryCondition, BoundarySpec, Profile};
    use crate::error::Error;
    use crate::grid::make_grid;

    #[test]
    fn zero_loading_gives_rest() {
        let g = make_grid(6, 5, 1.0, 1.0).unwrap();
        let pb = BrinkmanProblem::new(
            g,
            CellField::constant(&g, 1.0),
            1.0,
            BoundarySpec::brinkman_channel(0.0, 0.0),
            BrinkmanForm::Main,
        );
        let sol = solve_brinkman(&pb).unwrap();
        assert_eq!(sol.v.max_abs(), 0.0);
        assert_eq!(sol.p.max_abs(), 0.0);
    }

    #[test]
    fn plug_flow_between_moving_walls() {
        // walls move with the Darcy plug velocity, so the viscous term vanishes
        let g = make_grid(8, 4, 1.0, 1.0).unwrap();
        let wall = BoundaryCondition::FullVelocity {
            normal: Profile::Constant(0.0),
            tangential: Profile::Constant(2.0),
        };
        let bc = BoundarySpec {
            bottom: wall.clone(),
            top: wall,
            ..BoundarySpec::brinkman_channel(2.0, 0.0)
        };
        let pb = BrinkmanProblem::new(g, CellField::constant(&g, 1.0), 1.0, bc, BrinkmanForm::Main);
        let sol = solve_brinkman(&pb).unwrap();
        assert!(sol.v.x.iter().all(|v| (v - 2.0).abs() < 1e-11));
        assert!(sol.v.y.iter().all(|v| v.abs() < 1e-11));
    }

    #[test]
    fn rejects_wrong_kinds() {
        let g = make_grid(3, 3, 1.0, 1.0).unwrap();
        let pb = BrinkmanProblem::new(
            g,
            CellField::constant(&g, 1.0),
            1.0,
            BoundarySpec::darcy_channel(1.0, 0.0),
            BrinkmanForm::Main,
        );
        assert!(matches!(solve_brinkman(&pb), Err(Error::Input(_))));
        let pb = BrinkmanProblem {
            form: BrinkmanForm::Traction,
            bc: BoundarySpec::brinkman_channel(1.0, 0.0),
            ..pb
        };
        assert!(matches!(solve_brinkman(&pb), Err(Error::Input(_))));
    }

    #[test]
    fn iterative_path_matches_direct() {
        let g = make_grid(10, 8, 1.0, 1.0).unwrap();
        let k = CellField::from_fn(&g, |x, y| 0.1 + x + y);
        let mut pb = BrinkmanProblem::new(
            g,
            k,
            1.0,
            BoundarySpec::brinkman_channel(1.0, 0.0),
            BrinkmanForm::Main,
        );
        let direct = solve_brinkman(&pb).unwrap();
        pb.solver.method = crate::linalg::LinearSolver::Iterative;
        let iter = solve_brinkman(&pb).unwrap();
        assert!(
            direct.v.max_diff(&iter.v) < 1e-8,
            "{}",
            direct.v.max_diff(&iter.v)
        );
    }

    #[test]
    fn strain_rate_examples() {
        let g = make_grid(6, 6, 1.0, 1.0).unwrap();
        let d = strain_rate(&g, &FaceField::from_fns(&g, |_, _| 1.0, |_, _| 2.0)).unwrap();
        assert!(d.xx.max_abs() + d.xy.max_abs() + d.yy.max_abs() < 1e-14);
        let d = strain_rate(&g, &FaceField::from_fns(&g, |_, y| y, |_, _| 0.0)).unwrap();
        assert!(d.xy.values.iter().all(|v| (v - 0.5).abs() < 1e-13));
        assert!(d.xx.max_abs() + d.yy.max_abs() < 1e-14);
        let d = strain_rate(&g, &FaceField::from_fns(&g, |_, y| -y, |x, _| x)).unwrap();
        assert!(d.xx.max_abs() + d.xy.max_abs() + d.yy.max_abs() < 1e-13);
    }
}
