//! Benchmark fixtures shared by the criterion targets.

use porous_adjoint::{
    make_grid, BoundarySpec, BrinkmanForm, BrinkmanProblem, CellField, DarcyProblem, FlowProblem,
};

/// Pressure-driven channel with a smooth heterogeneous permeability.
pub fn darcy_channel(n: usize) -> FlowProblem {
    let grid = make_grid(n, n, 1.0, 1.0).expect("valid grid");
    let k = CellField::from_fn(&grid, |x, y| 0.5 + x * (1.0 - y));
    DarcyProblem::new(grid, k, 1.0, BoundarySpec::darcy_channel(1.0, 0.0)).into()
}

pub fn brinkman_channel(n: usize) -> FlowProblem {
    let grid = make_grid(n, n, 1.0, 1.0).expect("valid grid");
    let k = CellField::from_fn(&grid, |x, y| 0.05 + x * (1.0 - y));
    BrinkmanProblem::new(
        grid,
        k,
        1.0,
        BoundarySpec::brinkman_channel(1.0, 0.0),
        BrinkmanForm::Main,
    )
    .into()
}
