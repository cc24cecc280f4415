//! Discrete viscous dissipation `a(v, v) = int 2 mu D[v] : D[v]` on the
//! staggered grid.
//!
//! Normal strains live at cell centres and shear strains at grid nodes, so
//! the energy is a weighted sum of squared affine face combinations:
//!
//! ```text
//! a(v, v) = sum_cells 2 mu A (u_x^2 + v_y^2) + sum_nodes mu w_n (u_y + v_x)^2
//! ```
//!
//! with `w_n = A` at interior nodes, halved once per boundary the node lies
//! on. Shear differences across a boundary use a ghost value set by the
//! boundary condition of that side. Half the gradient of `a` is the viscous
//! force, which equals `-A mu lap v` on interior faces of a divergence-free
//! field.

use crate::boundary::{BoundaryCondition, BoundarySpec, Profile, Side};
use crate::grid::{FaceField, StaggeredGrid};

/// How a velocity component is continued past a side.
#[derive(Debug, Clone)]
pub(crate) enum Ghost {
    /// Prescribed tangential velocity: the mean of the inner and ghost values matches it.
    Reflect(Profile),
    /// Free tangential motion: the ghost copies the inner value.
    Mirror,
    /// No boundary information: linear extrapolation from the interior.
    Extrapolate,
}

pub(crate) fn ghost_rules(bc: Option<&BoundarySpec>) -> [Ghost; 4] {
    Side::ALL.map(|side| match bc.map(|b| b.get(side)) {
        Some(BoundaryCondition::FullVelocity { tangential, .. })
        | Some(BoundaryCondition::Pressure { tangential, .. }) => {
            Ghost::Reflect(tangential.clone())
        }
        Some(BoundaryCondition::Traction { .. }) => Ghost::Mirror,
        Some(BoundaryCondition::NormalVelocity { .. }) | None => Ghost::Extrapolate,
    })
}

/// `weight * (sum coeff * v_face + constant)^2`; faces use the global
/// numbering (x-faces first, then y-faces).
#[derive(Debug, Clone)]
pub(crate) struct QuadTerm {
    pub weight: f64,
    pub coeffs: Vec<(usize, f64)>,
    pub constant: f64,
}

impl QuadTerm {
    pub fn eval(&self, v: &FaceField, nxf: usize) -> f64 {
        self.constant
            + self
                .coeffs
                .iter()
                .map(|&(f, c)| c * if f < nxf { v.x[f] } else { v.y[f - nxf] })
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Default)]
struct Affine {
    coeffs: Vec<(usize, f64)>,
    constant: f64,
}

impl Affine {
    fn face(f: usize) -> Self {
        Self {
            coeffs: vec![(f, 1.0)],
            constant: 0.0,
        }
    }

    fn axpy(&mut self, a: f64, other: &Affine) {
        for &(f, c) in &other.coeffs {
            if let Some(e) = self.coeffs.iter_mut().find(|e| e.0 == f) {
                e.1 += a * c;
            } else {
                self.coeffs.push((f, a * c));
            }
        }
        self.constant += a * other.constant;
    }

    fn scaled(a: f64, other: &Affine) -> Self {
        let mut out = Affine::default();
        out.axpy(a, other);
        out
    }
}

/// Builds the squared terms of `a(v, v)` for viscosity `mu` under the ghost
/// rules of `bc` (linear extrapolation everywhere when `bc` is `None`).
pub(crate) fn strain_terms(
    grid: &StaggeredGrid,
    mu: f64,
    bc: Option<&BoundarySpec>,
) -> Vec<QuadTerm> {
    let rules = ghost_rules(bc);
    let [left, right, bottom, top] = &rules;
    let (nx, ny) = (grid.nx, grid.ny);
    let nxf = grid.n_xfaces();
    let area = grid.cell_area();

    // x-velocity on x-face column i, row jj in -1..=ny
    let u = |i: usize, jj: isize| -> Affine {
        if jj >= 0 && (jj as usize) < ny {
            return Affine::face(grid.xface(i, jj as usize));
        }
        let (rule, inner, next) = if jj < 0 {
            (bottom, 0, 1)
        } else {
            (top, ny - 1, ny.saturating_sub(2))
        };
        continuation(
            rule,
            i,
            nx,
            Affine::face(grid.xface(i, inner)),
            (ny >= 2).then(|| Affine::face(grid.xface(i, next))),
        )
    };
    // y-velocity on y-face row j, column ii in -1..=nx
    let v = |ii: isize, j: usize| -> Affine {
        if ii >= 0 && (ii as usize) < nx {
            return Affine::face(nxf + grid.yface(ii as usize, j));
        }
        let (rule, inner, next) = if ii < 0 {
            (left, 0, 1)
        } else {
            (right, nx - 1, nx.saturating_sub(2))
        };
        continuation(
            rule,
            j,
            ny,
            Affine::face(nxf + grid.yface(inner, j)),
            (nx >= 2).then(|| Affine::face(nxf + grid.yface(next, j))),
        )
    };

    let mut terms = Vec::with_capacity(2 * grid.n_cells() + (nx + 1) * (ny + 1));
    for j in 0..ny {
        for i in 0..nx {
            let mut ux = Affine::scaled(1.0 / grid.hx, &Affine::face(grid.xface(i + 1, j)));
            ux.axpy(-1.0 / grid.hx, &Affine::face(grid.xface(i, j)));
            terms.push(QuadTerm {
                weight: 2.0 * mu * area,
                coeffs: ux.coeffs,
                constant: ux.constant,
            });
            let mut vy = Affine::scaled(1.0 / grid.hy, &Affine::face(nxf + grid.yface(i, j + 1)));
            vy.axpy(-1.0 / grid.hy, &Affine::face(nxf + grid.yface(i, j)));
            terms.push(QuadTerm {
                weight: 2.0 * mu * area,
                coeffs: vy.coeffs,
                constant: vy.constant,
            });
        }
    }
    for j in 0..=ny {
        for i in 0..=nx {
            let fx = if i == 0 || i == nx { 0.5 } else { 1.0 };
            let fy = if j == 0 || j == ny { 0.5 } else { 1.0 };
            let mut s = Affine::scaled(1.0 / grid.hy, &u(i, j as isize));
            s.axpy(-1.0 / grid.hy, &u(i, j as isize - 1));
            s.axpy(1.0 / grid.hx, &v(i as isize, j));
            s.axpy(-1.0 / grid.hx, &v(i as isize - 1, j));
            s.coeffs.retain(|e| e.1 != 0.0);
            terms.push(QuadTerm {
                weight: mu * area * fx * fy,
                coeffs: s.coeffs,
                constant: s.constant,
            });
        }
    }
    terms
}

fn continuation(
    rule: &Ghost,
    node: usize,
    n: usize,
    inner: Affine,
    next: Option<Affine>,
) -> Affine {
    match rule {
        Ghost::Reflect(profile) => {
            let mut g = Affine::scaled(-1.0, &inner);
            g.constant += 2.0 * profile.node_value(node, n);
            g
        }
        Ghost::Mirror => inner,
        Ghost::Extrapolate => match next {
            Some(next) => {
                let mut g = Affine::scaled(2.0, &inner);
                g.axpy(-1.0, &next);
                g
            }
            None => inner,
        },
    }
}

/// Evaluates `a(v, v)`.
pub(crate) fn strain_energy(
    grid: &StaggeredGrid,
    mu: f64,
    v: &FaceField,
    bc: Option<&BoundarySpec>,
) -> f64 {
    let nxf = grid.n_xfaces();
    strain_terms(grid, mu, bc)
        .iter()
        .map(|t| {
            let s = t.eval(v, nxf);
            t.weight * s * s
        })
        .sum()
}

/// Half the gradient of `a` with respect to every face value.
pub(crate) fn half_energy_gradient(
    grid: &StaggeredGrid,
    mu: f64,
    v: &FaceField,
    bc: Option<&BoundarySpec>,
) -> FaceField {
    let nxf = grid.n_xfaces();
    let mut out = FaceField::zeros(grid);
    for t in strain_terms(grid, mu, bc) {
        let s = t.weight * t.eval(v, nxf);
        for &(f, c) in &t.coeffs {
            if f < nxf {
                out.x[f] += s * c;
            } else {
                out.y[f - nxf] += s * c;
            }
        }
    }
    out
}
