//! Manufactured solutions on the unit square with known discretization error.

use std::f64::consts::PI;

use porous_adjoint::{
    make_grid, solve_brinkman, solve_darcy, BodyForce, BoundaryCondition, BoundarySpec,
    BrinkmanForm, BrinkmanProblem, CellField, DarcyProblem, FaceField, Profile, StaggeredGrid,
};

fn k_star(x: f64, y: f64) -> f64 {
    1.0 + 0.5 * (PI * x).sin() * (PI * y).sin()
}

fn p_star(x: f64, y: f64) -> f64 {
    (PI * x).cos() * (PI * y).cos()
}

fn grad_p(x: f64, y: f64) -> (f64, f64) {
    (
        -PI * (PI * x).sin() * (PI * y).cos(),
        -PI * (PI * x).cos() * (PI * y).sin(),
    )
}

fn l2_faces(grid: &StaggeredGrid, v: &FaceField, exact: &FaceField) -> f64 {
    let mut s = 0.0;
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let f = grid.xface(i, j);
            s += grid.xface_volume(i) * (v.x[f] - exact.x[f]).powi(2);
        }
    }
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let f = grid.yface(i, j);
            s += grid.yface_volume(j) * (v.y[f] - exact.y[f]).powi(2);
        }
    }
    s.sqrt()
}

fn l2_cells(grid: &StaggeredGrid, p: &CellField, exact: &CellField) -> f64 {
    (p.values
        .iter()
        .zip(&exact.values)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        * grid.cell_area())
    .sqrt()
}

fn demeaned(p: &CellField) -> CellField {
    let m = p.mean();
    CellField::new(p.values.iter().map(|v| v - m).collect())
}

/// L2 errors (velocity, pressure) of the manufactured Darcy problem on `n x n` cells.
pub fn darcy_errors(n: usize) -> (f64, f64) {
    let g = make_grid(n, n, 1.0, 1.0).unwrap();
    let k = CellField::from_fn(&g, k_star);
    let source = CellField::from_fn(&g, |x, y| {
        let (px, py) = grad_p(x, y);
        let kx = 0.5 * PI * (PI * x).cos() * (PI * y).sin();
        let ky = 0.5 * PI * (PI * x).sin() * (PI * y).cos();
        -(kx * px + ky * py - 2.0 * PI * PI * k_star(x, y) * p_star(x, y))
    });
    let side = |x: f64| {
        let h = 1.0 / n as f64;
        Profile::Values((0..n).map(|m| p_star(x, (m as f64 + 0.5) * h)).collect())
    };
    let bc = BoundarySpec {
        left: BoundaryCondition::Pressure {
            pressure: side(0.0),
            tangential: Profile::Constant(0.0),
        },
        right: BoundaryCondition::Pressure {
            pressure: side(1.0),
            tangential: Profile::Constant(0.0),
        },
        bottom: BoundaryCondition::wall(),
        top: BoundaryCondition::wall(),
    };
    let sol = solve_darcy(&DarcyProblem::new(g, k, 1.0, bc).with_source(source)).unwrap();
    let exact_v = FaceField::from_fns(
        &g,
        |x, y| -k_star(x, y) * grad_p(x, y).0,
        |x, y| -k_star(x, y) * grad_p(x, y).1,
    );
    let exact_p = CellField::from_fn(&g, p_star);
    (
        l2_faces(&g, &sol.v, &exact_v),
        l2_cells(&g, &sol.p, &exact_p),
    )
}

fn u_star(x: f64, y: f64) -> (f64, f64) {
    (
        0.5 * PI * (1.0 - (2.0 * PI * x).cos()) * (2.0 * PI * y).sin(),
        -0.5 * PI * (2.0 * PI * x).sin() * (1.0 - (2.0 * PI * y).cos()),
    )
}

fn lap_u_star(x: f64, y: f64) -> (f64, f64) {
    let c = 2.0 * PI.powi(3);
    (
        c * (2.0 * PI * y).sin() * (2.0 * (2.0 * PI * x).cos() - 1.0),
        -c * (2.0 * PI * x).sin() * (2.0 * (2.0 * PI * y).cos() - 1.0),
    )
}

/// L2 errors (velocity, pressure) of the manufactured Darcy-Brinkman problem,
/// with the pressure compared in the mean-zero gauge.
pub fn brinkman_errors(n: usize) -> (f64, f64) {
    let g = make_grid(n, n, 1.0, 1.0).unwrap();
    let mu = 1.0;
    let k = CellField::from_fn(&g, k_star);
    // k on faces matches the harmonic face average to second order
    let force = FaceField::from_fns(
        &g,
        |x, y| mu / k_star(x, y) * u_star(x, y).0 + grad_p(x, y).0 - mu * lap_u_star(x, y).0,
        |x, y| mu / k_star(x, y) * u_star(x, y).1 + grad_p(x, y).1 - mu * lap_u_star(x, y).1,
    );
    let pb = BrinkmanProblem::new(
        g,
        k,
        mu,
        BoundarySpec::uniform(BoundaryCondition::no_slip()),
        BrinkmanForm::Main,
    )
    .with_body_force(BodyForce::Vector(force));
    let sol = solve_brinkman(&pb).unwrap();
    let exact_v = FaceField::from_fns(&g, |x, y| u_star(x, y).0, |x, y| u_star(x, y).1);
    let exact_p = demeaned(&CellField::from_fn(&g, p_star));
    (
        l2_faces(&g, &sol.v, &exact_v),
        l2_cells(&g, &sol.p, &exact_p),
    )
}
