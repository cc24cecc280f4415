//! Recognition of the four boundary-value-problem classes.
//!
//! | class | loaded sides | velocity sides | data | body force |
//! |-------|--------------|----------------|------|------------|
//! | A | whole boundary | none | (Brinkman main: zero tangential velocity) | any |
//! | B | some | some | zero velocity (Brinkman main: zero tangential velocity on loaded sides) | any |
//! | C | none | whole boundary | zero net flux | conservative, given as a potential |
//! | D | some | some | zero pressure / traction (Brinkman main: zero tangential velocity) | zero |
//!
//! Classes are tried in the order A, B, C, D; the notes list every match.

use serde::{Deserialize, Serialize};

use crate::boundary::{BcKind, BoundaryCondition, BoundarySpec};
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::problem::{FlowProblem, ModelForm};
use crate::system::{check_compatible, compatibility_defect};

/// Tolerance for the "prescribed value is zero" clauses.
pub const HOMOGENEITY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    A,
    B,
    C,
    D,
    General,
}

impl ClassTag {
    /// Pressure-driven classes, whose dissipation grows with permeability.
    pub fn is_pressure_driven(self) -> bool {
        matches!(self, ClassTag::A | ClassTag::B)
    }

    pub fn is_velocity_driven(self) -> bool {
        matches!(self, ClassTag::C | ClassTag::D)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::A => "A",
            ClassTag::B => "B",
            ClassTag::C => "C",
            ClassTag::D => "D",
            ClassTag::General => "General",
        }
    }
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvpClass {
    pub tag: ClassTag,
    pub model: ModelForm,
    /// Which clauses held or failed, one line per class.
    pub notes: Vec<String>,
}

struct Clauses {
    loaded: bool,
    velocity: bool,
    velocity_zero: bool,
    loaded_tangential_zero: bool,
    loaded_data_zero: bool,
    compatible: bool,
    potential: bool,
    force_zero: bool,
    source_free: bool,
}

pub fn classify_bvp(problem: &FlowProblem) -> Result<BvpClass> {
    let grid = problem.grid();
    let bc = problem.bc();
    bc.validate(grid)?;
    let model = problem.model();
    let allowed: &[BcKind] = match model {
        ModelForm::Darcy => &[BcKind::Pressure, BcKind::NormalVelocity],
        ModelForm::BrinkmanMain => &[BcKind::Pressure, BcKind::FullVelocity],
        ModelForm::BrinkmanTraction => &[BcKind::Traction, BcKind::FullVelocity],
    };
    bc.require_kinds(allowed, &format!("{model:?}"))?;
    let tol = HOMOGENEITY_TOL;

    let loaded_sides: Vec<&BoundaryCondition> = bc
        .sides()
        .map(|(_, c)| c)
        .filter(|c| c.is_loaded())
        .collect();
    let velocity_sides: Vec<&BoundaryCondition> = bc
        .sides()
        .map(|(_, c)| c)
        .filter(|c| !c.is_loaded())
        .collect();
    let compatible = if loaded_sides.is_empty() {
        let (net, ctol) = compatibility_defect(grid, bc, None);
        net.abs() <= ctol
    } else {
        false
    };
    let c = Clauses {
        loaded: !loaded_sides.is_empty(),
        velocity: !velocity_sides.is_empty(),
        velocity_zero: velocity_sides.iter().all(|c| match c {
            BoundaryCondition::NormalVelocity { normal } => normal.is_zero(tol),
            BoundaryCondition::FullVelocity { normal, tangential } => {
                normal.is_zero(tol) && tangential.is_zero(tol)
            }
            _ => true,
        }),
        loaded_tangential_zero: loaded_sides.iter().all(|c| match (model, c) {
            (ModelForm::BrinkmanMain, BoundaryCondition::Pressure { tangential, .. }) => {
                tangential.is_zero(tol)
            }
            _ => true,
        }),
        loaded_data_zero: loaded_sides.iter().all(|c| match c {
            BoundaryCondition::Pressure { pressure, .. } => pressure.is_zero(tol),
            BoundaryCondition::Traction { normal, tangential } => {
                normal.is_zero(tol) && tangential.is_zero(tol)
            }
            _ => true,
        }),
        compatible,
        potential: problem.body_force().potential(grid, tol).is_some(),
        force_zero: problem.body_force().is_zero(tol),
        source_free: problem.source().is_none_or(|s| s.max_abs() <= tol),
    };

    let checks: [(ClassTag, Vec<(&str, bool)>); 4] = [
        (
            ClassTag::A,
            vec![
                ("no velocity sides", !c.velocity),
                (
                    "zero tangential velocity on pressure sides",
                    c.loaded_tangential_zero,
                ),
            ],
        ),
        (
            ClassTag::B,
            vec![
                ("loaded sides present", c.loaded),
                ("velocity sides present", c.velocity),
                ("zero velocity data", c.velocity_zero),
                (
                    "zero tangential velocity on pressure sides",
                    c.loaded_tangential_zero,
                ),
            ],
        ),
        (
            ClassTag::C,
            vec![
                ("velocity on the whole boundary", !c.loaded),
                ("zero net flux", c.compatible),
                ("body force given by a potential", c.potential),
            ],
        ),
        (
            ClassTag::D,
            vec![
                ("loaded sides present", c.loaded),
                ("velocity sides present", c.velocity),
                ("zero pressure or traction data", c.loaded_data_zero),
                (
                    "zero tangential velocity on pressure sides",
                    c.loaded_tangential_zero,
                ),
                ("zero body force", c.force_zero),
            ],
        ),
    ];
    let mut notes = Vec::new();
    let mut tag = ClassTag::General;
    if !c.source_free {
        notes.push("continuity source present: not a class problem".to_string());
    }
    for (class, clauses) in &checks {
        let failed: Vec<&str> = clauses
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(n, _)| *n)
            .collect();
        if failed.is_empty() && c.source_free {
            notes.push(format!("{class}: all clauses hold"));
            if tag == ClassTag::General {
                tag = *class;
            }
        } else if failed.is_empty() {
            notes.push(format!("{class}: boundary clauses hold"));
        } else {
            notes.push(format!("{class}: fails {}", failed.join(", ")));
        }
    }
    Ok(BvpClass { tag, model, notes })
}

/// Net outward flux `sum v_n * face length` of a boundary prescribing
/// velocity on every side.
pub fn check_compatibility(grid: &StaggeredGrid, bc: &BoundarySpec) -> Result<f64> {
    if bc.has_loaded_side() {
        return Err(Error::NotPureVelocity);
    }
    bc.validate(grid)?;
    Ok(bc.prescribed_flux(grid))
}

/// Fails with a compatibility error when velocity is prescribed on the whole
/// boundary and the net flux, less any continuity source, exceeds the solver
/// tolerance.
pub fn require_compatibility(problem: &FlowProblem) -> Result<()> {
    problem.bc().validate(problem.grid())?;
    check_compatible(problem.grid(), problem.bc(), problem.source())
}

/// A problem whose constant boundary pressure was moved to zero. Pressures
/// solved on `problem` plus `shift` are pressures of the original problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedProblem {
    pub problem: FlowProblem,
    pub shift: f64,
}

impl ShiftedProblem {
    pub fn restore_pressure(&self, p: &crate::grid::CellField) -> crate::grid::CellField {
        crate::grid::CellField::new(p.values.iter().map(|v| v + self.shift).collect())
    }
}

/// Subtracts the common constant `c` from all pressure data (for traction
/// sides, `-c` from the normal traction), which leaves velocities unchanged.
pub fn shift_pressure_datum(problem: &FlowProblem) -> Result<ShiftedProblem> {
    let bc = problem.bc();
    bc.validate(problem.grid())?;
    if !problem.body_force().is_zero(HOMOGENEITY_TOL) {
        return Err(Error::NotShiftable("body force must vanish".into()));
    }
    let mut level: Option<f64> = None;
    let mut agree = |v: Option<f64>, what: &str| -> Result<()> {
        let v = v.ok_or_else(|| Error::NotShiftable(format!("{what} is not constant")))?;
        match level {
            Some(c) if (c - v).abs() > HOMOGENEITY_TOL * c.abs().max(1.0) => Err(
                Error::NotShiftable(format!("pressure levels {c} and {v} differ")),
            ),
            _ => {
                level = Some(v);
                Ok(())
            }
        }
    };
    for (side, cond) in bc.sides() {
        match cond {
            BoundaryCondition::Pressure { pressure, .. } => agree(
                pressure.constant_value(HOMOGENEITY_TOL),
                &format!("{} pressure", side.name()),
            )?,
            BoundaryCondition::Traction { normal, tangential } => {
                if !tangential.is_zero(HOMOGENEITY_TOL) {
                    return Err(Error::NotShiftable(format!(
                        "{} traction has a tangential part",
                        side.name()
                    )));
                }
                agree(
                    normal.constant_value(HOMOGENEITY_TOL).map(|t| -t),
                    &format!("{} traction", side.name()),
                )?
            }
            _ => {}
        }
    }
    let c = level.ok_or_else(|| Error::NotShiftable("no pressure side".into()))?;
    let mut shifted = bc.clone();
    for side in crate::boundary::Side::ALL {
        match shifted.get_mut(side) {
            BoundaryCondition::Pressure { pressure, .. } => *pressure = pressure.shifted(-c),
            BoundaryCondition::Traction { normal, .. } => *normal = normal.shifted(c),
            _ => {}
        }
    }
    Ok(ShiftedProblem {
        problem: problem.with_bc(shifted),
        shift: c,
    })
}
