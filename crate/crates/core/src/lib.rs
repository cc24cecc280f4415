//! Darcy and Darcy-Brinkman flow on 2D staggered grids, adjoint sensitivities
//! of the total dissipation rate with respect to permeability, classification
//! of boundary-value problems into classes A-D, and a two-material design
//! driver.

pub mod adjoint;
pub mod boundary;
pub mod brinkman;
pub mod classify;
pub mod darcy;
pub mod design;
pub mod dissipation;
pub mod error;
pub mod grid;
pub mod instances;
pub mod linalg;
pub mod problem;
mod system;
mod viscous;

pub use adjoint::{
    analytical_adjoint, solve_adjoint_brinkman, solve_adjoint_darcy, AdjointSolution, AdjointSource,
};
pub use boundary::{BcKind, BoundaryCondition, BoundarySpec, Profile, Side};
pub use brinkman::{solve_brinkman, strain_rate, StrainRate};
pub use classify::{
    check_compatibility, classify_bvp, require_compatibility, shift_pressure_datum, BvpClass,
    ClassTag, ShiftedProblem,
};
pub use darcy::{residuals_darcy, solve_darcy};
pub use design::{
    canonical_ab, canonical_cd, expected_verdict, interpolate_permeability,
    objective_monotone_check, optimize, run_table1, BoundedMaterial, ClassGroup, DesignField,
    DesignState, Interpolated, MonotoneReport, OptimizerOptions, Scenario, ScenarioParams, Sense,
    Table1, Table1Cell, Trend, Verdict,
};
pub use dissipation::{
    directional_derivative, discrete_gradient, fd_dissipation_gradient, fd_gradient,
    gradient_report, relative_max_error, sensitivity_field, solve_adjoint,
    total_dissipation_brinkman, total_dissipation_darcy, GradientReport, SensitivityField,
};
pub use error::{Error, Result};
pub use grid::{
    divergence, face_permeability, gradient, integrate_cells, make_grid, CellField, FaceField,
    FaceRef, Gradient, StaggeredGrid,
};
pub use linalg::{set_factorization_threads, LinearSolver, SolverOptions};
pub use problem::{
    BodyForce, BrinkmanForm, BrinkmanProblem, DarcyProblem, Diagnostics, FlowProblem, FlowSolution,
    ModelForm,
};
