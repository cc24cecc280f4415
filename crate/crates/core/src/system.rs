//! Mixed velocity-pressure system shared by the Darcy-Brinkman solver and the
//! exact discrete gradient.
//!
//! Unknowns are the face velocities not fixed by a velocity condition, then
//! one pressure per cell, then a mean-zero multiplier when no side carries a
//! pressure or traction. The matrix is symmetric:
//!
//! ```text
//! [ M + V   G ] [v]   [f]
//! [ G^T     0 ] [p] = [g]
//! ```
//!
//! `M` is the drag mass `vol_f mu / k_f`, `V` the Hessian of half the
//! viscous energy (absent for Darcy), and `G` the face-area-weighted pressure
//! gradient whose transpose is minus the integrated divergence.

use crate::boundary::{BoundaryCondition, BoundarySpec, Side};
use crate::error::{Error, Result};
use crate::grid::{face_permeability, CellField, FaceField, FaceRef, StaggeredGrid};
use crate::linalg::{Csr, TripletBuilder};
use crate::viscous::strain_terms;

pub(crate) struct Layout {
    pub nxf: usize,
    /// Global face -> velocity unknown.
    pub face_dof: Vec<Option<usize>>,
    /// Global face -> prescribed axis-oriented velocity.
    pub fixed: Vec<Option<f64>>,
    pub n_vel: usize,
    pub n_cells: usize,
    pub multiplier: bool,
}

impl Layout {
    pub fn new(grid: &StaggeredGrid, bc: &BoundarySpec) -> Self {
        let nxf = grid.n_xfaces();
        let nf = grid.n_faces();
        let mut fixed = vec![None; nf];
        for (side, cond) in bc.sides() {
            if let Some(normal) = cond.normal_velocity() {
                let n = grid.side_len(side);
                for m in 0..n {
                    let (face, _) = grid.side_face(side, m);
                    fixed[global(face, nxf)] = Some(side.outward_sign() * normal.face_value(m, n));
                }
            }
        }
        let mut face_dof = vec![None; nf];
        let mut n_vel = 0;
        for f in 0..nf {
            if fixed[f].is_none() {
                face_dof[f] = Some(n_vel);
                n_vel += 1;
            }
        }
        Self {
            nxf,
            face_dof,
            fixed,
            n_vel,
            n_cells: grid.n_cells(),
            multiplier: !bc.has_loaded_side(),
        }
    }

    pub fn n(&self) -> usize {
        self.n_vel + self.n_cells + usize::from(self.multiplier)
    }

    pub fn p_dof(&self, c: usize) -> usize {
        self.n_vel + c
    }

    pub fn mult_dof(&self) -> Option<usize> {
        self.multiplier.then(|| self.n_vel + self.n_cells)
    }

    /// Velocity field from a solution vector, with fixed faces filled in.
    pub fn velocity(&self, grid: &StaggeredGrid, x: &[f64]) -> FaceField {
        let mut v = FaceField::zeros(grid);
        for f in 0..self.face_dof.len() {
            let val = match (self.face_dof[f], self.fixed[f]) {
                (Some(d), _) => x[d],
                (None, Some(val)) => val,
                (None, None) => unreachable!(),
            };
            if f < self.nxf {
                v.x[f] = val;
            } else {
                v.y[f - self.nxf] = val;
            }
        }
        v
    }

    pub fn pressure(&self, x: &[f64]) -> CellField {
        CellField::new(x[self.n_vel..self.n_vel + self.n_cells].to_vec())
    }
}

pub(crate) fn global(face: FaceRef, nxf: usize) -> usize {
    match face {
        FaceRef::X(i) => i,
        FaceRef::Y(i) => nxf + i,
    }
}

pub(crate) fn face_get(v: &FaceField, f: usize, nxf: usize) -> f64 {
    if f < nxf {
        v.x[f]
    } else {
        v.y[f - nxf]
    }
}

/// Control volume of each face in global numbering.
pub(crate) fn face_volumes(grid: &StaggeredGrid) -> Vec<f64> {
    let mut vol = Vec::with_capacity(grid.n_faces());
    for _j in 0..grid.ny {
        for i in 0..=grid.nx {
            vol.push(grid.xface_volume(i));
        }
    }
    for j in 0..=grid.ny {
        for _i in 0..grid.nx {
            vol.push(grid.yface_volume(j));
        }
    }
    vol
}

/// Cell neighbours of every face: `(cell, sigma)` with `sigma = +1` when the
/// face is the east or north face of the cell.
pub(crate) fn face_cells(grid: &StaggeredGrid) -> Vec<Vec<(usize, f64)>> {
    let nxf = grid.n_xfaces();
    let mut out = vec![Vec::with_capacity(2); grid.n_faces()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let c = grid.cell(i, j);
            out[grid.xface(i, j)].push((c, -1.0));
            out[grid.xface(i + 1, j)].push((c, 1.0));
            out[nxf + grid.yface(i, j)].push((c, -1.0));
            out[nxf + grid.yface(i, j + 1)].push((c, 1.0));
        }
    }
    out
}

/// Length of a face in global numbering.
pub(crate) fn face_len(grid: &StaggeredGrid, f: usize) -> f64 {
    if f < grid.n_xfaces() {
        grid.hy
    } else {
        grid.hx
    }
}

/// Integrated boundary loads on free faces: `t_n` on the normal faces of
/// pressure and traction sides and, for traction sides, `t_t` on the
/// tangential velocities of the first row inside the boundary.
pub(crate) fn boundary_loads(
    grid: &StaggeredGrid,
    bc: &BoundarySpec,
    layout: &Layout,
) -> FaceField {
    let nxf = layout.nxf;
    let mut out = FaceField::zeros(grid);
    for (side, cond) in bc.sides() {
        let n = grid.side_len(side);
        let len = grid.side_face_len(side);
        let (tn, tt) = match cond {
            BoundaryCondition::Pressure { pressure, .. } => (Some((pressure, -1.0)), None),
            BoundaryCondition::Traction { normal, tangential } => {
                (Some((normal, 1.0)), Some(tangential))
            }
            _ => (None, None),
        };
        if let Some((profile, sign)) = tn {
            for m in 0..n {
                let (face, _) = grid.side_face(side, m);
                let f = global(face, nxf);
                if layout.face_dof[f].is_some() {
                    let t = sign * profile.face_value(m, n);
                    add(&mut out, f, nxf, t * side.outward_sign() * len);
                }
            }
        }
        if let Some(profile) = tt {
            if profile.is_zero(0.0) {
                continue;
            }
            // tangential unknowns at the nodes of this side
            let (count, spacing) = match side {
                Side::Left | Side::Right => (grid.ny, grid.hy),
                Side::Bottom | Side::Top => (grid.nx, grid.hx),
            };
            for m in 0..=count {
                let f = match side {
                    Side::Left => nxf + grid.yface(0, m),
                    Side::Right => nxf + grid.yface(grid.nx - 1, m),
                    Side::Bottom => grid.xface(m, 0),
                    Side::Top => grid.xface(m, grid.ny - 1),
                };
                if layout.face_dof[f].is_none() {
                    continue;
                }
                let w = if m == 0 || m == count {
                    0.5 * spacing
                } else {
                    spacing
                };
                add(&mut out, f, nxf, profile.node_value(m, count) * w);
            }
        }
    }
    out
}

fn add(v: &mut FaceField, f: usize, nxf: usize, val: f64) {
    if f < nxf {
        v.x[f] += val;
    } else {
        v.y[f - nxf] += val;
    }
}

pub(crate) struct Assembled {
    pub layout: Layout,
    pub matrix: Csr,
    pub rhs: Vec<f64>,
    /// Drag mass per global face.
    pub mass: Vec<f64>,
}

/// Inputs of the mixed system.
pub(crate) struct MixedInput<'a> {
    pub grid: &'a StaggeredGrid,
    pub k: &'a CellField,
    pub mu: f64,
    pub bc: &'a BoundarySpec,
    /// Body force sampled on faces (not yet integrated).
    pub force: &'a FaceField,
    pub source: Option<&'a CellField>,
    /// Include the viscous energy (Darcy-Brinkman).
    pub viscous: bool,
    /// Extra integrated face loads added to the free momentum rows.
    pub extra: Option<&'a FaceField>,
}

pub(crate) fn assemble(inp: &MixedInput) -> Result<Assembled> {
    let grid = inp.grid;
    let layout = Layout::new(grid, inp.bc);
    let nxf = layout.nxf;
    let n = layout.n();
    let kff = face_permeability(grid, inp.k)?;
    let kf: Vec<f64> = kff.x.iter().chain(&kff.y).copied().collect();
    let vol = face_volumes(grid);
    let mass: Vec<f64> = kf.iter().zip(&vol).map(|(k, v)| v * inp.mu / k).collect();
    let cells = face_cells(grid);
    let loads = boundary_loads(grid, inp.bc, &layout);

    let mut t = TripletBuilder::new(n);
    let mut rhs = vec![0.0; n];
    for f in 0..grid.n_faces() {
        let len = face_len(grid, f);
        match layout.face_dof[f] {
            Some(d) => {
                t.add(d, d, mass[f]);
                rhs[d] += vol[f] * face_get(inp.force, f, nxf) + face_get(&loads, f, nxf);
                if let Some(extra) = inp.extra {
                    rhs[d] += face_get(extra, f, nxf);
                }
                for &(c, sigma) in &cells[f] {
                    t.add_sym(d, layout.p_dof(c), -sigma * len);
                }
            }
            None => {
                let val = layout.fixed[f].unwrap();
                for &(c, sigma) in &cells[f] {
                    rhs[layout.p_dof(c)] += sigma * len * val;
                }
            }
        }
    }
    if let Some(s) = inp.source {
        let a = grid.cell_area();
        for c in 0..grid.n_cells() {
            rhs[layout.p_dof(c)] -= s.values[c] * a;
        }
    }
    if let Some(m) = layout.mult_dof() {
        let a = grid.cell_area();
        for c in 0..grid.n_cells() {
            t.add_sym(layout.p_dof(c), m, a);
        }
    }
    if inp.viscous {
        for term in strain_terms(grid, inp.mu, Some(inp.bc)) {
            let mut known = term.constant;
            let mut free: Vec<(usize, f64)> = Vec::with_capacity(term.coeffs.len());
            for &(f, c) in &term.coeffs {
                match layout.face_dof[f] {
                    Some(d) => free.push((d, c)),
                    None => known += c * layout.fixed[f].unwrap(),
                }
            }
            for &(da, ca) in &free {
                for &(db, cb) in &free {
                    t.add(da, db, term.weight * ca * cb);
                }
                rhs[da] -= term.weight * known * ca;
            }
        }
    }
    Ok(Assembled {
        layout,
        matrix: t.to_csr(),
        rhs,
        mass,
    })
}

/// Net prescribed outflow minus the integrated source, and the tolerance it
/// must meet when velocity is prescribed on the whole boundary.
pub(crate) fn compatibility_defect(
    grid: &StaggeredGrid,
    bc: &BoundarySpec,
    source: Option<&CellField>,
) -> (f64, f64) {
    let src = source
        .map(|s| s.values.iter().sum::<f64>() * grid.cell_area())
        .unwrap_or(0.0);
    let src_scale = source.map(|s| s.max_abs() * grid.area()).unwrap_or(0.0);
    let net = bc.prescribed_flux(grid) - src;
    let tol = 1e-10 * (grid.perimeter() * bc.velocity_scale() + src_scale);
    (net, tol)
}

pub(crate) fn check_compatible(
    grid: &StaggeredGrid,
    bc: &BoundarySpec,
    source: Option<&CellField>,
) -> Result<()> {
    if bc.has_loaded_side() {
        return Ok(());
    }
    let (net, tol) = compatibility_defect(grid, bc, source);
    if net.abs() > tol {
        return Err(Error::Compatibility {
            net_flux: net,
            tolerance: tol,
        });
    }
    Ok(())
}
