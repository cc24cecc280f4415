//! Per-side boundary conditions.
//!
//! Normal values are outward: a positive normal velocity leaves the domain.
//! Tangential values point along +y on the left and right sides and along +x
//! on the bottom and top sides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Sign of the outward normal relative to the coordinate axis.
    pub fn outward_sign(self) -> f64 {
        match self {
            Side::Left | Side::Bottom => -1.0,
            Side::Right | Side::Top => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

/// Boundary data along a side: a constant, or one value per boundary face
/// (`n` values) or per boundary node (`n + 1` values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Constant(f64),
    Values(Vec<f64>),
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Constant(0.0)
    }
}

impl Profile {
    /// Value at the centre of face `m` of `n`.
    pub fn face_value(&self, m: usize, n: usize) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Values(v) if v.len() == n + 1 => 0.5 * (v[m] + v[m + 1]),
            Profile::Values(v) => v[m],
        }
    }

    /// Value at node `m` of `n + 1`; face-centred data is averaged and held
    /// constant past the end faces.
    pub fn node_value(&self, m: usize, n: usize) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Values(v) if v.len() == n + 1 => v[m],
            Profile::Values(v) => {
                if m == 0 {
                    v[0]
                } else if m == n {
                    v[n - 1]
                } else {
                    0.5 * (v[m - 1] + v[m])
                }
            }
        }
    }

    /// True when every value is zero to within `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        match self {
            Profile::Constant(c) => c.abs() <= tol,
            Profile::Values(v) => v.iter().all(|x| x.abs() <= tol),
        }
    }

    /// The single value of a profile that is constant to within `tol`.
    pub fn constant_value(&self, tol: f64) -> Option<f64> {
        match self {
            Profile::Constant(c) => Some(*c),
            Profile::Values(v) => {
                let first = *v.first()?;
                v.iter().all(|x| (x - first).abs() <= tol).then_some(first)
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Profile::Constant(c) => c.abs(),
            Profile::Values(v) => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn shifted(&self, c: f64) -> Profile {
        match self {
            Profile::Constant(v) => Profile::Constant(v + c),
            Profile::Values(v) => Profile::Values(v.iter().map(|x| x + c).collect()),
        }
    }

    fn validate(&self, n: usize, what: &str) -> Result<()> {
        match self {
            Profile::Constant(c) if !c.is_finite() => {
                Err(Error::Input(format!("{what}: value must be finite")))
            }
            Profile::Values(v) if v.len() != n && v.len() != n + 1 => Err(Error::Input(format!(
                "{what}: expected {n} face values or {} node values, got {}",
                n + 1,
                v.len()
            ))),
            Profile::Values(v) if v.iter().any(|x| !x.is_finite()) => {
                Err(Error::Input(format!("{what}: values must be finite")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BcKind {
    Pressure,
    NormalVelocity,
    FullVelocity,
    Traction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// Prescribed pressure; under Darcy-Brinkman also the tangential velocity.
    Pressure {
        pressure: Profile,
        tangential: Profile,
    },
    /// Prescribed outward normal velocity (Darcy).
    NormalVelocity { normal: Profile },
    /// Prescribed outward normal and tangential velocity (Darcy-Brinkman).
    FullVelocity {
        normal: Profile,
        tangential: Profile,
    },
    /// Prescribed traction, split into outward-normal and tangential parts.
    Traction {
        normal: Profile,
        tangential: Profile,
    },
}

impl BoundaryCondition {
    pub fn kind(&self) -> BcKind {
        match self {
            BoundaryCondition::Pressure { .. } => BcKind::Pressure,
            BoundaryCondition::NormalVelocity { .. } => BcKind::NormalVelocity,
            BoundaryCondition::FullVelocity { .. } => BcKind::FullVelocity,
            BoundaryCondition::Traction { .. } => BcKind::Traction,
        }
    }

    /// Pressure or traction: the normal velocity is an unknown.
    pub fn is_loaded(&self) -> bool {
        matches!(
            self,
            BoundaryCondition::Pressure { .. } | BoundaryCondition::Traction { .. }
        )
    }

    /// Prescribed outward normal velocity, if any.
    pub fn normal_velocity(&self) -> Option<&Profile> {
        match self {
            BoundaryCondition::NormalVelocity { normal }
            | BoundaryCondition::FullVelocity { normal, .. } => Some(normal),
            _ => None,
        }
    }

    pub fn pressure(p: f64) -> Self {
        BoundaryCondition::Pressure {
            pressure: Profile::Constant(p),
            tangential: Profile::Constant(0.0),
        }
    }

    pub fn wall() -> Self {
        BoundaryCondition::NormalVelocity {
            normal: Profile::Constant(0.0),
        }
    }

    pub fn no_slip() -> Self {
        BoundaryCondition::FullVelocity {
            normal: Profile::Constant(0.0),
            tangential: Profile::Constant(0.0),
        }
    }

    pub fn traction(normal: f64) -> Self {
        BoundaryCondition::Traction {
            normal: Profile::Constant(normal),
            tangential: Profile::Constant(0.0),
        }
    }

    /// The same condition with every prescribed value set to zero.
    pub fn homogeneous(&self) -> Self {
        let z = Profile::Constant(0.0);
        match self {
            BoundaryCondition::Pressure { .. } => BoundaryCondition::Pressure {
                pressure: z.clone(),
                tangential: z,
            },
            BoundaryCondition::NormalVelocity { .. } => {
                BoundaryCondition::NormalVelocity { normal: z }
            }
            BoundaryCondition::FullVelocity { .. } => BoundaryCondition::FullVelocity {
                normal: z.clone(),
                tangential: z,
            },
            BoundaryCondition::Traction { .. } => BoundaryCondition::Traction {
                normal: z.clone(),
                tangential: z,
            },
        }
    }

    fn profiles(&self) -> Vec<(&'static str, &Profile)> {
        match self {
            BoundaryCondition::Pressure {
                pressure,
                tangential,
            } => {
                vec![("pressure", pressure), ("tangential", tangential)]
            }
            BoundaryCondition::NormalVelocity { normal } => vec![("normal", normal)],
            BoundaryCondition::FullVelocity { normal, tangential }
            | BoundaryCondition::Traction { normal, tangential } => {
                vec![("normal", normal), ("tangential", tangential)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
}

impl BoundarySpec {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self {
            left: bc.clone(),
            right: bc.clone(),
            bottom: bc.clone(),
            top: bc,
        }
    }

    /// Pressure-driven Darcy channel along x with impermeable top and bottom.
    pub fn darcy_channel(p_left: f64, p_right: f64) -> Self {
        Self {
            left: BoundaryCondition::pressure(p_left),
            right: BoundaryCondition::pressure(p_right),
            bottom: BoundaryCondition::wall(),
            top: BoundaryCondition::wall(),
        }
    }

    /// Pressure-driven Darcy-Brinkman channel along x with no-slip top and bottom.
    pub fn brinkman_channel(p_left: f64, p_right: f64) -> Self {
        Self {
            left: BoundaryCondition::pressure(p_left),
            right: BoundaryCondition::pressure(p_right),
            bottom: BoundaryCondition::no_slip(),
            top: BoundaryCondition::no_slip(),
        }
    }

    pub fn get(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn get_mut(&mut self, side: Side) -> &mut BoundaryCondition {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }

    pub fn sides(&self) -> impl Iterator<Item = (Side, &BoundaryCondition)> {
        Side::ALL.into_iter().map(move |s| (s, self.get(s)))
    }

    /// True when no side carries a pressure or traction condition.
    pub fn is_pure_velocity(&self) -> bool {
        self.sides().all(|(_, bc)| !bc.is_loaded())
    }

    pub fn has_loaded_side(&self) -> bool {
        self.sides().any(|(_, bc)| bc.is_loaded())
    }

    pub fn homogeneous(&self) -> Self {
        Self {
            left: self.left.homogeneous(),
            right: self.right.homogeneous(),
            bottom: self.bottom.homogeneous(),
            top: self.top.homogeneous(),
        }
    }

    /// Checks profile lengths and finiteness against the grid.
    pub fn validate(&self, grid: &StaggeredGrid) -> Result<()> {
        for (side, bc) in self.sides() {
            let n = grid.side_len(side);
            for (name, profile) in bc.profiles() {
                profile.validate(n, &format!("boundary {} {name}", side.name()))?;
            }
        }
        Ok(())
    }

    /// Rejects kinds outside `allowed` for the given model name.
    pub fn require_kinds(&self, allowed: &[BcKind], model: &str) -> Result<()> {
        for (side, bc) in self.sides() {
            if !allowed.contains(&bc.kind()) {
                return Err(Error::Input(format!(
                    "{model} does not accept a {:?} condition (on the {} side)",
                    bc.kind(),
                    side.name()
                )));
            }
        }
        Ok(())
    }

    /// Signed outward flux of the prescribed normal velocity over the sides
    /// that prescribe one.
    pub fn prescribed_flux(&self, grid: &StaggeredGrid) -> f64 {
        let mut total = 0.0;
        for (side, bc) in self.sides() {
            if let Some(normal) = bc.normal_velocity() {
                let n = grid.side_len(side);
                let len = grid.side_face_len(side);
                total += (0..n).map(|m| normal.face_value(m, n) * len).sum::<f64>();
            }
        }
        total
    }

    /// Largest prescribed velocity magnitude, used to scale tolerances.
    pub fn velocity_scale(&self) -> f64 {
        self.sides()
            .map(|(_, bc)| match bc {
                BoundaryCondition::NormalVelocity { normal } => normal.max_abs(),
                BoundaryCondition::FullVelocity { normal, tangential } => {
                    normal.max_abs().max(tangential.max_abs())
                }
                _ => 0.0,
            })
            .fold(0.0, f64::max)
    }
}
