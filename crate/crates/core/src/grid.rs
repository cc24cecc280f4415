//! Staggered (MAC) grid geometry, discrete fields and the basic operators.
//!
//! Cells are numbered `j * nx + i`. The x-face `(i, j)` with `i in 0..=nx`
//! sits on the line `x = i * hx` and is numbered `j * (nx + 1) + i`; the
//! y-face `(i, j)` with `j in 0..=ny` sits on `y = j * hy` and is numbered
//! `j * nx + i`. Face fields hold the x-component of a vector on x-faces and
//! the y-component on y-faces.

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryCondition, BoundarySpec, Side};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaggeredGrid {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub hx: f64,
    pub hy: f64,
}

/// Builds a grid of `nx * ny` cells on `[0, lx] x [0, ly]`.
pub fn make_grid(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<StaggeredGrid> {
    if nx == 0 || ny == 0 {
        return Err(Error::Input(format!(
            "grid needs at least one cell per direction, got {nx}x{ny}"
        )));
    }
    if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
        return Err(Error::Input(format!(
            "grid extents must be positive and finite, got {lx}x{ly}"
        )));
    }
    Ok(StaggeredGrid {
        nx,
        ny,
        lx,
        ly,
        hx: lx / nx as f64,
        hy: ly / ny as f64,
    })
}

impl StaggeredGrid {
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_xfaces(&self) -> usize {
        (self.nx + 1) * self.ny
    }

    pub fn n_yfaces(&self) -> usize {
        self.nx * (self.ny + 1)
    }

    pub fn n_faces(&self) -> usize {
        self.n_xfaces() + self.n_yfaces()
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn xface(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn yface(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.lx + self.ly)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    pub fn xface_center(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, (j as f64 + 0.5) * self.hy)
    }

    pub fn yface_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, j as f64 * self.hy)
    }

    /// Control volume of an x-face: a full cell in the interior, half a cell on the boundary.
    pub fn xface_volume(&self, i: usize) -> f64 {
        if i == 0 || i == self.nx {
            0.5 * self.cell_area()
        } else {
            self.cell_area()
        }
    }

    pub fn yface_volume(&self, j: usize) -> f64 {
        if j == 0 || j == self.ny {
            0.5 * self.cell_area()
        } else {
            self.cell_area()
        }
    }

    /// Number of boundary faces on a side.
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left | Side::Right => self.ny,
            Side::Bottom | Side::Top => self.nx,
        }
    }

    /// Length of one boundary face on a side.
    pub fn side_face_len(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hy,
            Side::Bottom | Side::Top => self.hx,
        }
    }

    /// Spacing normal to a side.
    pub fn side_normal_h(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hx,
            Side::Bottom | Side::Top => self.hy,
        }
    }

    /// The `m`-th boundary face of a side, counted in the increasing
    /// tangential direction, with the cell it bounds.
    pub fn side_face(&self, side: Side, m: usize) -> (FaceRef, usize) {
        match side {
            Side::Left => (FaceRef::X(self.xface(0, m)), self.cell(0, m)),
            Side::Right => (
                FaceRef::X(self.xface(self.nx, m)),
                self.cell(self.nx - 1, m),
            ),
            Side::Bottom => (FaceRef::Y(self.yface(m, 0)), self.cell(m, 0)),
            Side::Top => (
                FaceRef::Y(self.yface(m, self.ny)),
                self.cell(m, self.ny - 1),
            ),
        }
    }

    /// Tangential coordinate of the `m`-th face centre on a side.
    pub fn side_face_coord(&self, side: Side, m: usize) -> f64 {
        (m as f64 + 0.5) * self.side_face_len(side)
    }

    /// Side owning an x-face, if it lies on the boundary.
    pub fn xface_side(&self, i: usize) -> Option<Side> {
        if i == 0 {
            Some(Side::Left)
        } else if i == self.nx {
            Some(Side::Right)
        } else {
            None
        }
    }

    pub fn yface_side(&self, j: usize) -> Option<Side> {
        if j == 0 {
            Some(Side::Bottom)
        } else if j == self.ny {
            Some(Side::Top)
        } else {
            None
        }
    }

    pub fn check_cells(&self, f: &CellField, what: &str) -> Result<()> {
        if f.values.len() != self.n_cells() {
            return Err(Error::Shape(format!(
                "{what}: expected {} cell values, got {}",
                self.n_cells(),
                f.values.len()
            )));
        }
        Ok(())
    }

    pub fn check_faces(&self, f: &FaceField, what: &str) -> Result<()> {
        if f.x.len() != self.n_xfaces() || f.y.len() != self.n_yfaces() {
            return Err(Error::Shape(format!(
                "{what}: expected {}+{} face values, got {}+{}",
                self.n_xfaces(),
                self.n_yfaces(),
                f.x.len(),
                f.y.len()
            )));
        }
        Ok(())
    }
}

/// A face addressed by orientation and index within that orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRef {
    X(usize),
    Y(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellField {
    pub values: Vec<f64>,
}

impl CellField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(grid: &StaggeredGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &StaggeredGrid, v: f64) -> Self {
        Self {
            values: vec![v; grid.n_cells()],
        }
    }

    /// Samples `f` at cell centres.
    pub fn from_fn(grid: &StaggeredGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.cell_center(i, j);
                values.push(f(x, y));
            }
        }
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            0.0
        } else {
            self.values.iter().sum::<f64>() / self.values.len() as f64
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceField {
    /// x-component on x-faces.
    pub x: Vec<f64>,
    /// y-component on y-faces.
    pub y: Vec<f64>,
}

impl FaceField {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn zeros(grid: &StaggeredGrid) -> Self {
        Self {
            x: vec![0.0; grid.n_xfaces()],
            y: vec![0.0; grid.n_yfaces()],
        }
    }

    /// Samples the x-component `fx` on x-faces and `fy` on y-faces.
    pub fn from_fns(
        grid: &StaggeredGrid,
        fx: impl Fn(f64, f64) -> f64,
        fy: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut x = Vec::with_capacity(grid.n_xfaces());
        for j in 0..grid.ny {
            for i in 0..=grid.nx {
                let (px, py) = grid.xface_center(i, j);
                x.push(fx(px, py));
            }
        }
        let mut y = Vec::with_capacity(grid.n_yfaces());
        for j in 0..=grid.ny {
            for i in 0..grid.nx {
                let (px, py) = grid.yface_center(i, j);
                y.push(fy(px, py));
            }
        }
        Self { x, y }
    }

    pub fn get(&self, f: FaceRef) -> f64 {
        match f {
            FaceRef::X(i) => self.x[i],
            FaceRef::Y(i) => self.y[i],
        }
    }

    pub fn set(&mut self, f: FaceRef, v: f64) {
        match f {
            FaceRef::X(i) => self.x[i] = v,
            FaceRef::Y(i) => self.y[i] = v,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| c * v).collect(),
            y: self.y.iter().map(|v| c * v).collect(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Largest componentwise difference to another field of the same shape.
    pub fn max_diff(&self, other: &FaceField) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Averages each component to cell centres.
    pub fn cell_centered(&self, grid: &StaggeredGrid) -> (CellField, CellField) {
        let mut u = Vec::with_capacity(grid.n_cells());
        let mut v = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                u.push(0.5 * (self.x[grid.xface(i, j)] + self.x[grid.xface(i + 1, j)]));
                v.push(0.5 * (self.y[grid.yface(i, j)] + self.y[grid.yface(i, j + 1)]));
            }
        }
        (CellField::new(u), CellField::new(v))
    }
}

/// Cellwise `(v_E - v_W)/hx + (v_N - v_S)/hy`.
pub fn divergence(grid: &StaggeredGrid, v: &FaceField) -> Result<CellField> {
    grid.check_faces(v, "divergence")?;
    let mut out = Vec::with_capacity(grid.n_cells());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let dx = (v.x[grid.xface(i + 1, j)] - v.x[grid.xface(i, j)]) / grid.hx;
            let dy = (v.y[grid.yface(i, j + 1)] - v.y[grid.yface(i, j)]) / grid.hy;
            out.push(dx + dy);
        }
    }
    Ok(CellField::new(out))
}

/// Face-normal pressure gradient. Faces on sides without a pressure
/// condition carry no gradient and are flagged instead.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: FaceField,
    pub flagged_x: Vec<bool>,
    pub flagged_y: Vec<bool>,
}

impl Gradient {
    pub fn is_flagged(&self, f: FaceRef) -> bool {
        match f {
            FaceRef::X(i) => self.flagged_x[i],
            FaceRef::Y(i) => self.flagged_y[i],
        }
    }
}

/// Two-point differences on interior faces and one-sided differences over
/// half a cell to the prescribed value on pressure boundary faces.
pub fn gradient(grid: &StaggeredGrid, p: &CellField, bc: &BoundarySpec) -> Result<Gradient> {
    grid.check_cells(p, "gradient")?;
    if !p.all_finite() {
        return Err(Error::Input(
            "gradient: pressure field has non-finite values".into(),
        ));
    }
    let mut values = FaceField::zeros(grid);
    for j in 0..grid.ny {
        for i in 1..grid.nx {
            values.x[grid.xface(i, j)] =
                (p.values[grid.cell(i, j)] - p.values[grid.cell(i - 1, j)]) / grid.hx;
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            values.y[grid.yface(i, j)] =
                (p.values[grid.cell(i, j)] - p.values[grid.cell(i, j - 1)]) / grid.hy;
        }
    }
    let mut flagged_x = vec![false; grid.n_xfaces()];
    let mut flagged_y = vec![false; grid.n_yfaces()];
    for side in Side::ALL {
        let n = grid.side_len(side);
        let half = 0.5 * grid.side_normal_h(side);
        for m in 0..n {
            let (face, cell) = grid.side_face(side, m);
            match bc.get(side) {
                BoundaryCondition::Pressure { pressure, .. } => {
                    let pb = pressure.face_value(m, n);
                    // outward difference, then orient along the axis
                    let g = side.outward_sign() * (pb - p.values[cell]) / half;
                    values.set(face, g);
                }
                _ => match face {
                    FaceRef::X(f) => flagged_x[f] = true,
                    FaceRef::Y(f) => flagged_y[f] = true,
                },
            }
        }
    }
    Ok(Gradient {
        values,
        flagged_x,
        flagged_y,
    })
}

/// Midpoint-rule integral `sum f_c * hx * hy`.
pub fn integrate_cells(grid: &StaggeredGrid, f: &CellField) -> Result<f64> {
    grid.check_cells(f, "integrate_cells")?;
    Ok(f.values.iter().sum::<f64>() * grid.cell_area())
}

/// Harmonic mean of the two adjacent cells on interior faces, the adjacent
/// cell value on boundary faces.
pub fn face_permeability(grid: &StaggeredGrid, k: &CellField) -> Result<FaceField> {
    check_permeability(grid, k)?;
    let harm = |a: f64, b: f64| 2.0 / (1.0 / a + 1.0 / b);
    let mut out = FaceField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..=grid.nx {
            let kf = if i == 0 {
                k.values[grid.cell(0, j)]
            } else if i == grid.nx {
                k.values[grid.cell(grid.nx - 1, j)]
            } else {
                harm(k.values[grid.cell(i - 1, j)], k.values[grid.cell(i, j)])
            };
            out.x[grid.xface(i, j)] = kf;
        }
    }
    for j in 0..=grid.ny {
        for i in 0..grid.nx {
            let kf = if j == 0 {
                k.values[grid.cell(i, 0)]
            } else if j == grid.ny {
                k.values[grid.cell(i, grid.ny - 1)]
            } else {
                harm(k.values[grid.cell(i, j - 1)], k.values[grid.cell(i, j)])
            };
            out.y[grid.yface(i, j)] = kf;
        }
    }
    Ok(out)
}

pub(crate) fn check_permeability(grid: &StaggeredGrid, k: &CellField) -> Result<()> {
    grid.check_cells(k, "permeability")?;
    if let Some(bad) = k.values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Input(format!(
            "permeability must be positive and finite, found {bad}"
        )));
    }
    Ok(())
}
