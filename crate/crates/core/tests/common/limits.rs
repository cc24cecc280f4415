//! Stokes and Darcy limits of the Darcy-Brinkman solver and the agreement of
//! its two boundary forms, as measured quantities.

use porous_adjoint::{
    face_permeability, make_grid, solve_brinkman, solve_darcy, BoundaryCondition, BoundarySpec,
    BrinkmanForm, BrinkmanProblem, CellField, DarcyProblem, Profile,
};

/// Relative L2 error of the x-velocity against `y (1 - y) / 2` for a unit
/// pressure drop across the unit square at `k = 1e6`.
pub fn poiseuille_error(n: usize) -> f64 {
    let g = make_grid(n, n, 1.0, 1.0).unwrap();
    let pb = BrinkmanProblem::new(
        g,
        CellField::constant(&g, 1e6),
        1.0,
        BoundarySpec::brinkman_channel(1.0, 0.0),
        BrinkmanForm::Main,
    );
    let sol = solve_brinkman(&pb).unwrap();
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..n {
        for i in 0..=n {
            let (_, y) = g.xface_center(i, j);
            let exact = 0.5 * y * (1.0 - y);
            num += (sol.v.x[g.xface(i, j)] - exact).powi(2);
            den += exact * exact;
        }
    }
    (num / den).sqrt()
}

/// Largest relative x-velocity difference between the Darcy-Brinkman and
/// Darcy channel solutions at permeability `k`, on faces farther than
/// `max(10 sqrt(k), h)` from the walls.
pub fn darcy_limit_deviation(n: usize, k: f64) -> f64 {
    let g = make_grid(n, n, 1.0, 1.0).unwrap();
    let kf = CellField::constant(&g, k);
    let brinkman = solve_brinkman(&BrinkmanProblem::new(
        g,
        kf.clone(),
        1.0,
        BoundarySpec::brinkman_channel(1.0, 0.0),
        BrinkmanForm::Main,
    ))
    .unwrap();
    let darcy = solve_darcy(&DarcyProblem::new(
        g,
        kf,
        1.0,
        BoundarySpec::darcy_channel(1.0, 0.0),
    ))
    .unwrap();
    let layer = (10.0 * k.sqrt()).max(g.hy);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..=n {
            let (_, y) = g.xface_center(i, j);
            if y < layer || y > 1.0 - layer {
                continue;
            }
            let f = g.xface(i, j);
            worst = worst.max((brinkman.v.x[f] - darcy.v.x[f]).abs() / darcy.v.x[f].abs());
        }
    }
    worst
}

/// Traction-form against main-form solve of an `nx x ny` channel with
/// `k = k(x)` and walls sliding at the plug velocity, so that no shear
/// arises. Returns (velocity difference, pressure difference, largest
/// deviation of the main-form x-velocity from the plug velocity).
pub fn traction_form_difference(nx: usize, ny: usize) -> (f64, f64, f64) {
    let g = make_grid(nx, ny, 2.0, 1.0).unwrap();
    let k = CellField::from_fn(&g, |x, _| 0.5 + x * x);
    let (pl, pr, mu) = (3.0, 1.0, 2.0);
    // discrete plug velocity: pressure drop over the series of face resistances
    let kf = face_permeability(&g, &k).unwrap();
    let resistance: f64 = (0..=nx)
        .map(|i| g.xface_volume(i) / g.hy / kf.x[g.xface(i, 0)])
        .sum();
    let u = (pl - pr) / (mu * resistance);
    let wall = BoundaryCondition::FullVelocity {
        normal: Profile::Constant(0.0),
        tangential: Profile::Constant(u),
    };
    let main_bc = BoundarySpec {
        bottom: wall.clone(),
        top: wall.clone(),
        ..BoundarySpec::brinkman_channel(pl, pr)
    };
    let trac_bc = BoundarySpec {
        left: BoundaryCondition::traction(-pl),
        right: BoundaryCondition::traction(-pr),
        bottom: wall.clone(),
        top: wall,
    };
    let main = solve_brinkman(&BrinkmanProblem::new(
        g,
        k.clone(),
        mu,
        main_bc,
        BrinkmanForm::Main,
    ))
    .unwrap();
    let trac = solve_brinkman(&BrinkmanProblem::new(
        g,
        k,
        mu,
        trac_bc,
        BrinkmanForm::Traction,
    ))
    .unwrap();
    let dv = main.v.max_diff(&trac.v);
    let dp = main
        .p
        .values
        .iter()
        .zip(&trac.p.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let plug = main.v.x.iter().fold(0.0f64, |m, v| m.max((v - u).abs()));
    (dv, dp, plug)
}
