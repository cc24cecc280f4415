//! Problem and solution types shared by the Darcy and Darcy-Brinkman solvers.

use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::grid::{check_permeability, CellField, FaceField, StaggeredGrid};
use crate::linalg::SolverOptions;

/// Body force `rho * b`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum BodyForce {
    #[default]
    None,
    /// Face-sampled vector: x-component on x-faces, y-component on y-faces.
    Vector(FaceField),
    /// Cell-centred potential `psi` with `rho * b = -grad psi`.
    Potential(CellField),
}

impl BodyForce {
    /// Spatially uniform vector force.
    pub fn uniform(grid: &StaggeredGrid, bx: f64, by: f64) -> Self {
        BodyForce::Vector(FaceField::from_fns(grid, |_, _| bx, |_, _| by))
    }

    /// Force sampled on faces. A potential is differenced across interior
    /// faces; boundary faces copy the nearest interior face.
    pub fn face_values(&self, grid: &StaggeredGrid) -> Result<FaceField> {
        match self {
            BodyForce::None => Ok(FaceField::zeros(grid)),
            BodyForce::Vector(f) => {
                grid.check_faces(f, "body force")?;
                if !f.all_finite() {
                    return Err(Error::Input("body force has non-finite values".into()));
                }
                Ok(f.clone())
            }
            BodyForce::Potential(psi) => {
                grid.check_cells(psi, "body force potential")?;
                if !psi.all_finite() {
                    return Err(Error::Input(
                        "body force potential has non-finite values".into(),
                    ));
                }
                let mut out = FaceField::zeros(grid);
                for j in 0..grid.ny {
                    for i in 1..grid.nx {
                        out.x[grid.xface(i, j)] = -(psi.values[grid.cell(i, j)]
                            - psi.values[grid.cell(i - 1, j)])
                            / grid.hx;
                    }
                    if grid.nx > 1 {
                        out.x[grid.xface(0, j)] = out.x[grid.xface(1, j)];
                        out.x[grid.xface(grid.nx, j)] = out.x[grid.xface(grid.nx - 1, j)];
                    }
                }
                for j in 1..grid.ny {
                    for i in 0..grid.nx {
                        out.y[grid.yface(i, j)] = -(psi.values[grid.cell(i, j)]
                            - psi.values[grid.cell(i, j - 1)])
                            / grid.hy;
                    }
                }
                if grid.ny > 1 {
                    for i in 0..grid.nx {
                        out.y[grid.yface(i, 0)] = out.y[grid.yface(i, 1)];
                        out.y[grid.yface(i, grid.ny)] = out.y[grid.yface(i, grid.ny - 1)];
                    }
                }
                Ok(out)
            }
        }
    }

    /// True when the force is absent or identically zero.
    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            BodyForce::None => true,
            BodyForce::Vector(f) => f.max_abs() <= tol,
            BodyForce::Potential(psi) => {
                let first = psi.values.first().copied().unwrap_or(0.0);
                psi.values.iter().all(|v| (v - first).abs() <= tol)
            }
        }
    }

    /// The potential of a conservative force, when one is known exactly:
    /// an explicit potential, or zero for an absent or zero force.
    pub fn potential(&self, grid: &StaggeredGrid, tol: f64) -> Option<CellField> {
        match self {
            BodyForce::Potential(psi) => Some(psi.clone()),
            _ if self.is_zero(tol) => Some(CellField::zeros(grid)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarcyProblem {
    pub grid: StaggeredGrid,
    pub k: CellField,
    pub mu: f64,
    pub body_force: BodyForce,
    pub bc: BoundarySpec,
    /// Optional continuity source `div v = s`, used by manufactured-solution tests.
    pub source: Option<CellField>,
    pub solver: SolverOptions,
}

impl DarcyProblem {
    pub fn new(grid: StaggeredGrid, k: CellField, mu: f64, bc: BoundarySpec) -> Self {
        Self {
            grid,
            k,
            mu,
            body_force: BodyForce::None,
            bc,
            source: None,
            solver: SolverOptions::default(),
        }
    }

    pub fn with_body_force(mut self, body_force: BodyForce) -> Self {
        self.body_force = body_force;
        self
    }

    pub fn with_source(mut self, source: CellField) -> Self {
        self.source = Some(source);
        self
    }
}

/// Which boundary statement the Darcy-Brinkman problem uses on loaded sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BrinkmanForm {
    /// Normal stress and tangential velocity prescribed.
    #[default]
    Main,
    /// Full traction vector prescribed.
    Traction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrinkmanProblem {
    pub grid: StaggeredGrid,
    pub k: CellField,
    pub mu: f64,
    pub body_force: BodyForce,
    pub bc: BoundarySpec,
    pub form: BrinkmanForm,
    pub source: Option<CellField>,
    pub solver: SolverOptions,
}

impl BrinkmanProblem {
    pub fn new(
        grid: StaggeredGrid,
        k: CellField,
        mu: f64,
        bc: BoundarySpec,
        form: BrinkmanForm,
    ) -> Self {
        Self {
            grid,
            k,
            mu,
            body_force: BodyForce::None,
            bc,
            form,
            source: None,
            solver: SolverOptions::default(),
        }
    }

    pub fn with_body_force(mut self, body_force: BodyForce) -> Self {
        self.body_force = body_force;
        self
    }

    pub fn with_source(mut self, source: CellField) -> Self {
        self.source = Some(source);
        self
    }
}

/// Model and boundary statement of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelForm {
    Darcy,
    BrinkmanMain,
    BrinkmanTraction,
}

/// Either model, for code that treats them uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FlowProblem {
    Darcy(DarcyProblem),
    Brinkman(BrinkmanProblem),
}

impl From<DarcyProblem> for FlowProblem {
    fn from(p: DarcyProblem) -> Self {
        FlowProblem::Darcy(p)
    }
}

impl From<BrinkmanProblem> for FlowProblem {
    fn from(p: BrinkmanProblem) -> Self {
        FlowProblem::Brinkman(p)
    }
}

impl FlowProblem {
    pub fn grid(&self) -> &StaggeredGrid {
        match self {
            FlowProblem::Darcy(p) => &p.grid,
            FlowProblem::Brinkman(p) => &p.grid,
        }
    }

    pub fn k(&self) -> &CellField {
        match self {
            FlowProblem::Darcy(p) => &p.k,
            FlowProblem::Brinkman(p) => &p.k,
        }
    }

    pub fn mu(&self) -> f64 {
        match self {
            FlowProblem::Darcy(p) => p.mu,
            FlowProblem::Brinkman(p) => p.mu,
        }
    }

    pub fn bc(&self) -> &BoundarySpec {
        match self {
            FlowProblem::Darcy(p) => &p.bc,
            FlowProblem::Brinkman(p) => &p.bc,
        }
    }

    pub fn body_force(&self) -> &BodyForce {
        match self {
            FlowProblem::Darcy(p) => &p.body_force,
            FlowProblem::Brinkman(p) => &p.body_force,
        }
    }

    pub fn source(&self) -> Option<&CellField> {
        match self {
            FlowProblem::Darcy(p) => p.source.as_ref(),
            FlowProblem::Brinkman(p) => p.source.as_ref(),
        }
    }

    pub fn solver(&self) -> &SolverOptions {
        match self {
            FlowProblem::Darcy(p) => &p.solver,
            FlowProblem::Brinkman(p) => &p.solver,
        }
    }

    pub fn model(&self) -> ModelForm {
        match self {
            FlowProblem::Darcy(_) => ModelForm::Darcy,
            FlowProblem::Brinkman(p) => match p.form {
                BrinkmanForm::Main => ModelForm::BrinkmanMain,
                BrinkmanForm::Traction => ModelForm::BrinkmanTraction,
            },
        }
    }

    /// The same problem with a different permeability field.
    pub fn with_permeability(&self, k: CellField) -> Self {
        let mut out = self.clone();
        match &mut out {
            FlowProblem::Darcy(p) => p.k = k,
            FlowProblem::Brinkman(p) => p.k = k,
        }
        out
    }

    pub fn with_bc(&self, bc: BoundarySpec) -> Self {
        let mut out = self.clone();
        match &mut out {
            FlowProblem::Darcy(p) => p.bc = bc,
            FlowProblem::Brinkman(p) => p.bc = bc,
        }
        out
    }

    pub fn solve(&self) -> Result<FlowSolution> {
        match self {
            FlowProblem::Darcy(p) => crate::darcy::solve_darcy(p),
            FlowProblem::Brinkman(p) => crate::brinkman::solve_brinkman(p),
        }
    }

    /// Total dissipation rate of a velocity field under this problem's model
    /// and boundary data.
    pub fn dissipation(&self, v: &FaceField) -> Result<f64> {
        match self {
            FlowProblem::Darcy(p) => {
                crate::dissipation::total_dissipation_darcy(&p.grid, &p.k, p.mu, v)
            }
            FlowProblem::Brinkman(p) => {
                crate::dissipation::total_dissipation_brinkman(&p.grid, &p.k, p.mu, v, Some(&p.bc))
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        validate_common(self.grid(), self.k(), self.mu(), self.bc(), self.source())
    }
}

pub(crate) fn validate_common(
    grid: &StaggeredGrid,
    k: &CellField,
    mu: f64,
    bc: &BoundarySpec,
    source: Option<&CellField>,
) -> Result<()> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Input(format!(
            "viscosity must be positive and finite, got {mu}"
        )));
    }
    check_permeability(grid, k)?;
    bc.validate(grid)?;
    if let Some(s) = source {
        grid.check_cells(s, "source")?;
        if !s.all_finite() {
            return Err(Error::Input("source has non-finite values".into()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Relative residual of the final linear solve.
    pub residual: f64,
    pub iterations: usize,
    /// Set when no side fixes the pressure and the mean-zero gauge was applied.
    pub gauge_pinned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    pub v: FaceField,
    pub p: CellField,
    pub diagnostics: Diagnostics,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn potential_force_is_minus_gradient() {
        let g = make_grid(4, 3, 1.0, 1.0).unwrap();
        let psi = CellField::from_fn(&g, |x, y| 2.0 * x - y);
        let f = BodyForce::Potential(psi).face_values(&g).unwrap();
        assert!(f.x.iter().all(|v| (v + 2.0).abs() < 1e-12));
        assert!(f.y.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_force_has_zero_potential() {
        let g = make_grid(2, 2, 1.0, 1.0).unwrap();
        assert!(BodyForce::None.potential(&g, 1e-14).is_some());
        assert!(BodyForce::uniform(&g, 0.0, 0.0)
            .potential(&g, 1e-14)
            .is_some());
        assert!(BodyForce::uniform(&g, 1.0, 0.0)
            .potential(&g, 1e-14)
            .is_none());
    }
}
