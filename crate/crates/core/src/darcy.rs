//! Darcy solver: velocity is eliminated face by face,
//! `v_f = (k_f / mu) (b_f - (grad p)_f)`, leaving a symmetric five-point
//! pressure system.

use crate::boundary::{BcKind, BoundaryCondition, Side};
use crate::error::Result;
use crate::grid::{divergence, face_permeability, gradient, CellField, FaceField};
use crate::linalg::{pcg, solve_direct, TripletBuilder};
use crate::problem::{validate_common, DarcyProblem, Diagnostics, FlowSolution};
use crate::system::check_compatible;

/// Relative tolerance of the conjugate-gradient path.
const CG_TOLERANCE: f64 = 1e-12;

pub(crate) fn validate(problem: &DarcyProblem) -> Result<()> {
    validate_common(
        &problem.grid,
        &problem.k,
        problem.mu,
        &problem.bc,
        problem.source.as_ref(),
    )?;
    problem.bc.require_kinds(
        &[BcKind::Pressure, BcKind::NormalVelocity],
        "the Darcy model",
    )
}

pub fn solve_darcy(problem: &DarcyProblem) -> Result<FlowSolution> {
    validate(problem)?;
    let grid = &problem.grid;
    let bc = &problem.bc;
    check_compatible(grid, bc, problem.source.as_ref())?;

    let kf = face_permeability(grid, &problem.k)?;
    let b = problem.body_force.face_values(grid)?;
    let mu = problem.mu;
    let n = grid.n_cells();
    let area = grid.cell_area();
    let pure_velocity = bc.is_pure_velocity();
    let mut t = TripletBuilder::new(n + usize::from(pure_velocity));
    let mut rhs = vec![0.0; t.n];

    // interior x-faces
    for j in 0..grid.ny {
        for i in 1..grid.nx {
            let f = grid.xface(i, j);
            let m = kf.x[f] / mu;
            let (l, r) = (grid.cell(i - 1, j), grid.cell(i, j));
            interior(
                &mut t,
                &mut rhs,
                l,
                r,
                grid.hy * m / grid.hx,
                grid.hy * m * b.x[f],
            );
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            let f = grid.yface(i, j);
            let m = kf.y[f] / mu;
            let (s, nn) = (grid.cell(i, j - 1), grid.cell(i, j));
            interior(
                &mut t,
                &mut rhs,
                s,
                nn,
                grid.hx * m / grid.hy,
                grid.hx * m * b.y[f],
            );
        }
    }
    for side in Side::ALL {
        let count = grid.side_len(side);
        let len = grid.side_face_len(side);
        let half = 0.5 * grid.side_normal_h(side);
        let sigma = side.outward_sign();
        for m in 0..count {
            let (face, c) = grid.side_face(side, m);
            match bc.get(side) {
                BoundaryCondition::Pressure { pressure, .. } => {
                    let mf = kf.get(face) / mu;
                    let cb = len * mf / half;
                    t.add(c, c, cb);
                    rhs[c] += cb * pressure.face_value(m, count) - sigma * len * mf * b.get(face);
                }
                BoundaryCondition::NormalVelocity { normal } => {
                    rhs[c] -= len * normal.face_value(m, count);
                }
                _ => unreachable!("validated"),
            }
        }
    }
    if let Some(s) = &problem.source {
        for (r, s) in rhs.iter_mut().zip(&s.values) {
            *r += s * area;
        }
    }

    let (p, stats) = if problem.solver.use_direct(n) {
        if pure_velocity {
            for c in 0..n {
                t.add_sym(c, n, 1.0);
            }
        }
        let (mut x, stats) = solve_direct(t.to_csr(), &rhs, problem.solver.tolerance)?;
        x.truncate(n);
        (x, stats)
    } else {
        let cap = problem.solver.max_iterations.unwrap_or(10 * n);
        pcg(
            &t.to_csr(),
            &rhs,
            CG_TOLERANCE.min(problem.solver.tolerance),
            cap,
            pure_velocity,
        )?
    };
    let p = CellField::new(p);
    let v = velocity_from_pressure(problem, &p, &kf, &b)?;
    log::debug!(
        "darcy {}x{}: residual {:.2e} after {} iterations",
        grid.nx,
        grid.ny,
        stats.residual,
        stats.iterations
    );
    Ok(FlowSolution {
        v,
        p,
        diagnostics: Diagnostics {
            residual: stats.residual,
            iterations: stats.iterations,
            gauge_pinned: pure_velocity,
        },
    })
}

fn interior(t: &mut TripletBuilder, rhs: &mut [f64], lo: usize, hi: usize, c: f64, flux_b: f64) {
    t.add(lo, lo, c);
    t.add(hi, hi, c);
    t.add_sym(lo, hi, -c);
    rhs[lo] -= flux_b;
    rhs[hi] += flux_b;
}

fn velocity_from_pressure(
    problem: &DarcyProblem,
    p: &CellField,
    kf: &FaceField,
    b: &FaceField,
) -> Result<FaceField> {
    let grid = &problem.grid;
    let grad = gradient(grid, p, &problem.bc)?;
    let mut v = FaceField::zeros(grid);
    for f in 0..grid.n_xfaces() {
        v.x[f] = kf.x[f] / problem.mu * (b.x[f] - grad.values.x[f]);
    }
    for f in 0..grid.n_yfaces() {
        v.y[f] = kf.y[f] / problem.mu * (b.y[f] - grad.values.y[f]);
    }
    for side in Side::ALL {
        if let Some(normal) = problem.bc.get(side).normal_velocity() {
            let count = grid.side_len(side);
            for m in 0..count {
                let (face, _) = grid.side_face(side, m);
                v.set(face, side.outward_sign() * normal.face_value(m, count));
            }
        }
    }
    Ok(v)
}

/// Discrete residuals of a candidate solution: `mu/k_f v_f + (grad p)_f - b_f`
/// on faces without a velocity condition, `v_f - v_prescribed` on faces with
/// one, and `div v - s` per cell.
pub fn residuals_darcy(
    problem: &DarcyProblem,
    solution: &FlowSolution,
) -> Result<(FaceField, CellField)> {
    validate(problem)?;
    let grid = &problem.grid;
    grid.check_faces(&solution.v, "residuals_darcy velocity")?;
    grid.check_cells(&solution.p, "residuals_darcy pressure")?;
    let kf = face_permeability(grid, &problem.k)?;
    let b = problem.body_force.face_values(grid)?;
    let grad = gradient(grid, &solution.p, &problem.bc)?;
    let v = &solution.v;
    let mut mom = FaceField::zeros(grid);
    for f in 0..grid.n_xfaces() {
        mom.x[f] = problem.mu / kf.x[f] * v.x[f] + grad.values.x[f] - b.x[f];
    }
    for f in 0..grid.n_yfaces() {
        mom.y[f] = problem.mu / kf.y[f] * v.y[f] + grad.values.y[f] - b.y[f];
    }
    for side in Side::ALL {
        if let Some(normal) = problem.bc.get(side).normal_velocity() {
            let count = grid.side_len(side);
            for m in 0..count {
                let (face, _) = grid.side_face(side, m);
                mom.set(
                    face,
                    v.get(face) - side.outward_sign() * normal.face_value(m, count),
                );
            }
        }
    }
    let mut cont = divergence(grid, v)?;
    if let Some(s) = &problem.source {
        for (c, sv) in cont.values.iter_mut().zip(&s.values) {
            *c -= sv;
        }
    }
    Ok((mom, cont))
}
