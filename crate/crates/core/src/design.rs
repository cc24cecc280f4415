//! Two-material permeability design by projected gradient steps.
//!
//! The design variable `gamma` in `[0, 1]` selects the high-permeability
//! material (`gamma = 1`) or the low one (`gamma = 0`) in each cell. The
//! permeability follows a rational interpolation of `1/k`, which penalises
//! intermediate values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryCondition, BoundarySpec, Profile};
use crate::classify::{classify_bvp, ClassTag};
use crate::dissipation::discrete_gradient;
use crate::error::{Error, Result};
use crate::grid::{make_grid, CellField, StaggeredGrid};
use crate::problem::{DarcyProblem, FlowProblem, FlowSolution};

/// `min gamma >= 1 - VERDICT_TOL` is all-high, `max gamma <= VERDICT_TOL` all-low.
pub const VERDICT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundedMaterial {
    HighPermeability,
    LowPermeability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    TrivialAllHigh,
    TrivialAllLow,
    Nontrivial,
}

impl Verdict {
    pub fn of(gamma: &CellField) -> Self {
        let min = gamma.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = gamma
            .values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if min >= 1.0 - VERDICT_TOL {
            Verdict::TrivialAllHigh
        } else if max <= VERDICT_TOL {
            Verdict::TrivialAllLow
        } else {
            Verdict::Nontrivial
        }
    }

    pub fn is_trivial(self) -> bool {
        self != Verdict::Nontrivial
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::TrivialAllHigh => "trivial-all-high",
            Verdict::TrivialAllLow => "trivial-all-low",
            Verdict::Nontrivial => "nontrivial",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub sense: Sense,
    pub bound: BoundedMaterial,
    /// Largest admissible area fraction of the bounded material.
    pub volume_fraction: f64,
    pub k_low: f64,
    pub k_high: f64,
    pub q: f64,
}

impl Scenario {
    pub fn new(sense: Sense, bound: BoundedMaterial, volume_fraction: f64) -> Self {
        Self {
            sense,
            bound,
            volume_fraction,
            k_low: 1e-3,
            k_high: 1.0,
            q: 8.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.volume_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Input(format!(
                "volume fraction must lie in (0, 1), got {f}"
            )));
        }
        if !(self.k_low > 0.0 && self.k_low < self.k_high && self.k_high.is_finite()) {
            return Err(Error::Input(format!(
                "material permeabilities must satisfy 0 < k_low < k_high, got {} and {}",
                self.k_low, self.k_high
            )));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Input(format!(
                "interpolation parameter must be positive, got {}",
                self.q
            )));
        }
        Ok(())
    }

    /// Area fraction occupied by the bounded material.
    pub fn bounded_fraction(&self, gamma: &CellField) -> f64 {
        let mean = gamma.mean();
        match self.bound {
            BoundedMaterial::HighPermeability => mean,
            BoundedMaterial::LowPermeability => 1.0 - mean,
        }
    }

    fn initial_gamma(&self) -> f64 {
        match self.bound {
            BoundedMaterial::HighPermeability => self.volume_fraction,
            BoundedMaterial::LowPermeability => 1.0 - self.volume_fraction,
        }
    }
}

/// Per-cell material indicator with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignField {
    pub gamma: CellField,
}

impl DesignField {
    pub fn new(gamma: CellField) -> Result<Self> {
        check_gamma(&gamma)?;
        Ok(Self { gamma })
    }
}

fn check_gamma(gamma: &CellField) -> Result<()> {
    if let Some((c, g)) = gamma
        .values
        .iter()
        .enumerate()
        .find(|(_, g)| !(0.0..=1.0).contains(*g))
    {
        return Err(Error::Input(format!(
            "design value {g} in cell {c} is outside [0, 1]"
        )));
    }
    Ok(())
}

/// Interpolated permeability and its derivative with respect to `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpolated {
    pub k: CellField,
    pub dk_dgamma: CellField,
}

/// `1/k = 1/k_high + (1/k_low - 1/k_high) (1-gamma)(1+q) / ((1-gamma) + q)`.
pub fn interpolate_permeability(gamma: &CellField, scenario: &Scenario) -> Result<Interpolated> {
    scenario.validate()?;
    check_gamma(gamma)?;
    let (kl, kh, q) = (scenario.k_low, scenario.k_high, scenario.q);
    let jump = 1.0 / kl - 1.0 / kh;
    let (k, dk): (Vec<f64>, Vec<f64>) = gamma
        .values
        .iter()
        .map(|&g| {
            let s = 1.0 - g;
            let inv = 1.0 / kh + jump * s * (1.0 + q) / (s + q);
            let k = if g == 0.0 {
                kl
            } else if g == 1.0 {
                kh
            } else {
                1.0 / inv
            };
            (k, k * k * jump * (1.0 + q) * q / ((s + q) * (s + q)))
        })
        .unzip();
    Ok(Interpolated {
        k: CellField::new(k),
        dk_dgamma: CellField::new(dk),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOptions {
    pub max_iters: usize,
    /// Largest change of any `gamma` in one iteration.
    pub move_limit: f64,
    /// Stop when no `gamma` changes by more than this.
    pub step_tol: f64,
    /// Average the sensitivities over 3x3 neighbourhoods.
    pub filter: bool,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            move_limit: 0.2,
            step_tol: 1e-4,
            filter: false,
        }
    }
}

const MAX_HALVINGS: usize = 5;
const PROGRESS_SLACK: f64 = 1e-12;
/// Gradients below this fraction of the largest one take proportionally shorter steps.
const STEP_SATURATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignState {
    pub gamma: DesignField,
    pub scenario: Scenario,
    /// Objective of every accepted design, starting with the initial one.
    pub history: Vec<f64>,
    /// Area fraction of the bounded material in the final design.
    pub bounded_fraction: f64,
    /// The bound is attained to within `VERDICT_TOL` of the volume fraction.
    pub constraint_active: bool,
    pub iterations: usize,
    pub converged: bool,
    pub verdict: Verdict,
}

struct Evaluation {
    objective: f64,
    k: CellField,
    dk: CellField,
    solution: FlowSolution,
}

fn evaluate(problem: &FlowProblem, gamma: &CellField, scenario: &Scenario) -> Result<Evaluation> {
    let Interpolated { k, dk_dgamma } = interpolate_permeability(gamma, scenario)?;
    let pb = problem.with_permeability(k.clone());
    let solution = pb.solve()?;
    let objective = pb.dissipation(&solution.v)?;
    Ok(Evaluation {
        objective,
        k,
        dk: dk_dgamma,
        solution,
    })
}

fn smooth(grid: &StaggeredGrid, g: &CellField) -> CellField {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    CellField::new(
        (0..grid.n_cells())
            .map(|c| {
                let (i, j) = ((c % grid.nx) as isize, (c / grid.nx) as isize);
                let mut sum = 0.0;
                let mut n = 0.0;
                for dj in -1..=1 {
                    for di in -1..=1 {
                        let (a, b) = (i + di, j + dj);
                        if a >= 0 && a < nx && b >= 0 && b < ny {
                            sum += g.values[(b * nx + a) as usize];
                            n += 1.0;
                        }
                    }
                }
                sum / n
            })
            .collect(),
    )
}

/// Moves `gamma` along the scaled signed gradient, shifts every trial value
/// by a common `lambda` and clips to the move-limit box so the bounded
/// material stays within its volume fraction.
fn projected_step(
    gamma: &CellField,
    direction: &CellField,
    scenario: &Scenario,
    move_limit: f64,
) -> CellField {
    let scale = direction.max_abs();
    let raw: Vec<f64> = if scale > 0.0 {
        direction
            .values
            .iter()
            .map(|d| move_limit * d / (STEP_SATURATION * scale))
            .collect()
    } else {
        vec![0.0; gamma.len()]
    };
    let apply = |lambda: f64| -> CellField {
        CellField::new(
            gamma
                .values
                .iter()
                .zip(&raw)
                .map(|(g, r)| {
                    (g + r - lambda).clamp((g - move_limit).max(0.0), (g + move_limit).min(1.0))
                })
                .collect(),
        )
    };
    let f = scenario.volume_fraction;
    let feasible = |g: &CellField| scenario.bounded_fraction(g) <= f;
    let trial = apply(0.0);
    if feasible(&trial) {
        return trial;
    }
    // the bounded fraction is monotone in lambda; beyond these shifts every
    // value sits at one end of its box
    let lo = raw.iter().copied().fold(0.0, f64::min) - 2.0 * move_limit;
    let hi = raw.iter().copied().fold(0.0, f64::max) + 2.0 * move_limit;
    let (mut good, mut bad) = match scenario.bound {
        BoundedMaterial::HighPermeability => (hi, 0.0),
        BoundedMaterial::LowPermeability => (lo, 0.0),
    };
    for _ in 0..200 {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if feasible(&apply(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    apply(good)
}

/// Projected-gradient extremization of the total dissipation rate over the
/// two-material design, starting from the uniform design that saturates the
/// volume bound.
pub fn optimize(
    problem: &FlowProblem,
    scenario: &Scenario,
    options: &OptimizerOptions,
) -> Result<DesignState> {
    scenario.validate()?;
    if !(options.move_limit > 0.0 && options.move_limit <= 1.0) {
        return Err(Error::Input(format!(
            "move limit must lie in (0, 1], got {}",
            options.move_limit
        )));
    }
    let class = classify_bvp(problem)?;
    if class.tag == ClassTag::General {
        log::warn!(
            "optimizing a problem outside classes A-D; the sign structure is not guaranteed"
        );
    }
    let grid = *problem.grid();
    let sign = match scenario.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let improves = |new: f64, old: f64| {
        sign * (new - old) >= -PROGRESS_SLACK * old.abs().max(f64::MIN_POSITIVE)
    };

    let mut gamma = CellField::constant(&grid, scenario.initial_gamma());
    let mut current = evaluate(problem, &gamma, scenario)?;
    let mut history = vec![current.objective];
    let mut move_limit = options.move_limit;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let pb = problem.with_permeability(current.k.clone());
        let dphi_dk = discrete_gradient(&pb, &current.solution)?;
        let mut direction = CellField::new(
            dphi_dk
                .values
                .iter()
                .zip(&current.dk.values)
                .map(|(g, d)| sign * g * d)
                .collect(),
        );
        if options.filter {
            direction = smooth(&grid, &direction);
        }
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = projected_step(&gamma, &direction, scenario, move_limit);
            let eval = evaluate(problem, &trial, scenario)?;
            if improves(eval.objective, current.objective) {
                accepted = Some((trial, eval));
                break;
            }
            move_limit *= 0.5;
        }
        let Some((trial, eval)) = accepted else {
            log::debug!("no improving step after {MAX_HALVINGS} halvings; stopping at iteration {iterations}");
            converged = true;
            break;
        };
        let change = trial
            .values
            .iter()
            .zip(&gamma.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        gamma = trial;
        current = eval;
        history.push(current.objective);
        log::debug!(
            "iteration {iterations}: objective {:.6e}, max change {change:.2e}",
            current.objective
        );
        if change < options.step_tol {
            converged = true;
            break;
        }
    }
    let bounded_fraction = scenario.bounded_fraction(&gamma);
    Ok(DesignState {
        verdict: Verdict::of(&gamma),
        constraint_active: scenario.volume_fraction - bounded_fraction <= VERDICT_TOL,
        bounded_fraction,
        gamma: DesignField { gamma },
        scenario: *scenario,
        history,
        iterations,
        converged,
    })
}

/// Pressure-driven (A/B) or velocity-driven (C/D) problem family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassGroup {
    AB,
    CD,
}

/// Material scenario shared by all eight table cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub volume_fraction: f64,
    pub k_low: f64,
    pub k_high: f64,
    pub q: f64,
    pub options: OptimizerOptions,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            volume_fraction: 0.4,
            k_low: 1e-3,
            k_high: 1.0,
            q: 8.0,
            options: OptimizerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Cell {
    pub bound: BoundedMaterial,
    pub sense: Sense,
    pub group: ClassGroup,
    pub expected: Verdict,
    pub state: DesignState,
}

impl Table1Cell {
    pub fn matches(&self) -> bool {
        self.state.verdict == self.expected
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub cells: Vec<Table1Cell>,
}

impl Table1 {
    pub fn all_match(&self) -> bool {
        self.cells.iter().all(Table1Cell::matches)
    }
}

/// Outcome predicted by the sensitivity sign: a trivial design whenever the
/// bound does not oppose the preferred material.
pub fn expected_verdict(bound: BoundedMaterial, sense: Sense, group: ClassGroup) -> Verdict {
    let wants_high = matches!(
        (sense, group),
        (Sense::Maximize, ClassGroup::AB) | (Sense::Minimize, ClassGroup::CD)
    );
    match (bound, wants_high) {
        (BoundedMaterial::HighPermeability, true) | (BoundedMaterial::LowPermeability, false) => {
            Verdict::Nontrivial
        }
        (BoundedMaterial::HighPermeability, false) => Verdict::TrivialAllLow,
        (BoundedMaterial::LowPermeability, true) => Verdict::TrivialAllHigh,
    }
}

/// Runs the eight bound x sense x class-group scenarios concurrently.
pub fn run_table1(
    problem_ab: &FlowProblem,
    problem_cd: &FlowProblem,
    params: &ScenarioParams,
) -> Result<Table1> {
    let ab = classify_bvp(problem_ab)?.tag;
    if !matches!(ab, ClassTag::A | ClassTag::B) {
        return Err(Error::Input(format!(
            "the pressure-driven problem is of class {ab}, expected A or B"
        )));
    }
    let cd = classify_bvp(problem_cd)?.tag;
    if !matches!(cd, ClassTag::C | ClassTag::D) {
        return Err(Error::Input(format!(
            "the velocity-driven problem is of class {cd}, expected C or D"
        )));
    }
    let mut jobs = Vec::new();
    for bound in [
        BoundedMaterial::HighPermeability,
        BoundedMaterial::LowPermeability,
    ] {
        for group in [ClassGroup::AB, ClassGroup::CD] {
            for sense in [Sense::Maximize, Sense::Minimize] {
                jobs.push((bound, sense, group));
            }
        }
    }
    let cells: Result<Vec<Table1Cell>> = jobs
        .into_par_iter()
        .map(|(bound, sense, group)| {
            let scenario = Scenario {
                sense,
                bound,
                volume_fraction: params.volume_fraction,
                k_low: params.k_low,
                k_high: params.k_high,
                q: params.q,
            };
            let problem = match group {
                ClassGroup::AB => problem_ab,
                ClassGroup::CD => problem_cd,
            };
            let state = optimize(problem, &scenario, &params.options)?;
            Ok(Table1Cell {
                bound,
                sense,
                group,
                expected: expected_verdict(bound, sense, group),
                state,
            })
        })
        .collect();
    Ok(Table1 { cells: cells? })
}

/// Pressure-driven bend on the unit square: `p = 1` on the left, `p = 0` on
/// the top, impermeable bottom and right. Class B.
pub fn canonical_ab(n: usize) -> Result<FlowProblem> {
    let grid = make_grid(n, n, 1.0, 1.0)?;
    let bc = BoundarySpec {
        left: BoundaryCondition::pressure(1.0),
        right: BoundaryCondition::wall(),
        bottom: BoundaryCondition::wall(),
        top: BoundaryCondition::pressure(0.0),
    };
    Ok(DarcyProblem::new(grid, CellField::constant(&grid, 1.0), 1.0, bc).into())
}

/// Velocity-driven bend on the unit square: unit inflow on the left, `p = 0`
/// on the top, impermeable bottom and right. Class D.
pub fn canonical_cd(n: usize) -> Result<FlowProblem> {
    let grid = make_grid(n, n, 1.0, 1.0)?;
    let bc = BoundarySpec {
        left: BoundaryCondition::NormalVelocity {
            normal: Profile::Constant(-1.0),
        },
        right: BoundaryCondition::wall(),
        bottom: BoundaryCondition::wall(),
        top: BoundaryCondition::pressure(0.0),
    };
    Ok(DarcyProblem::new(grid, CellField::constant(&grid, 1.0), 1.0, bc).into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trend {
    Increasing,
    Decreasing,
    /// Every value is zero; nothing is asserted.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub class: ClassTag,
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    pub trend: Trend,
    /// Smallest `|Phi_{i+1} - Phi_i| / max |Phi|` over consecutive scales.
    pub min_relative_separation: f64,
}

/// Evaluates the dissipation at `c k` for each scale `c` and checks that it
/// increases (classes A/B) or decreases (classes C/D) strictly.
pub fn objective_monotone_check(problem: &FlowProblem, scales: &[f64]) -> Result<MonotoneReport> {
    if scales.is_empty() || scales.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::Input(
            "scales must be a nonempty list of positive finite numbers".into(),
        ));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Input("scales must be strictly increasing".into()));
    }
    let class = classify_bvp(problem)?.tag;
    if class == ClassTag::General {
        return Err(Error::Unsupported(
            "monotonicity holds only for classes A-D".into(),
        ));
    }
    let values: Result<Vec<f64>> = scales
        .par_iter()
        .map(|&c| {
            let pb = problem.with_permeability(problem.k().scaled(c));
            let sol = pb.solve()?;
            pb.dissipation(&sol.v)
        })
        .collect();
    let values = values?;
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_relative_separation = if top > 0.0 {
        values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() / top)
            .fold(f64::INFINITY, f64::min)
    } else {
        0.0
    };
    let trend = if top == 0.0 {
        Trend::Degenerate
    } else if class.is_pressure_driven() {
        Trend::Increasing
    } else {
        Trend::Decreasing
    };
    let holds = match trend {
        Trend::Increasing => values.windows(2).all(|w| w[1] > w[0]),
        Trend::Decreasing => values.windows(2).all(|w| w[1] < w[0]),
        Trend::Degenerate => true,
    };
    if !holds {
        return Err(Error::Invariant(format!(
            "dissipation {values:?} is not {trend:?} for class {class}"
        )));
    }
    Ok(MonotoneReport {
        class,
        scales: scales.to_vec(),
        values,
        trend,
        min_relative_separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(sense: Sense, bound: BoundedMaterial) -> Scenario {
        Scenario::new(sense, bound, 0.4)
    }

    #[test]
    fn interpolation_endpoints_and_value() {
        let g = make_grid(3, 1, 1.0, 1.0).unwrap();
        let s = Scenario {
            q: 1.0,
            k_low: 1e-4,
            k_high: 1.0,
            ..scenario(Sense::Maximize, BoundedMaterial::HighPermeability)
        };
        let out = interpolate_permeability(&CellField::new(vec![0.0, 1.0, 0.5]), &s).unwrap();
        assert_eq!(out.k.values[0], 1e-4);
        assert_eq!(out.k.values[1], 1.0);
        // 1/k = 1 + 9999 * (0.5 * 2 / 1.5) = 6667
        assert!((out.k.values[2] - 1.0 / 6667.0).abs() < 1e-18);
        let _ = g;
    }

    #[test]
    fn interpolation_derivative_matches_differences() {
        let s = scenario(Sense::Maximize, BoundedMaterial::HighPermeability);
        for &g0 in &[0.1, 0.5, 0.9] {
            let h = 1e-6;
            let at = |g: f64| interpolate_permeability(&CellField::new(vec![g]), &s).unwrap();
            let fd = (at(g0 + h).k.values[0] - at(g0 - h).k.values[0]) / (2.0 * h);
            let d = at(g0).dk_dgamma.values[0];
            assert!((fd - d).abs() <= 1e-6 * d.abs(), "{fd} {d}");
            assert!(d > 0.0);
        }
    }

    #[test]
    fn interpolation_rejects_bad_gamma() {
        let s = scenario(Sense::Maximize, BoundedMaterial::HighPermeability);
        assert!(interpolate_permeability(&CellField::new(vec![1.5]), &s).is_err());
        assert!(interpolate_permeability(&CellField::new(vec![-0.1]), &s).is_err());
        let bad = Scenario {
            volume_fraction: 0.0,
            ..s
        };
        assert!(interpolate_permeability(&CellField::new(vec![0.5]), &bad).is_err());
    }

    #[test]
    fn expected_pattern() {
        use BoundedMaterial::*;
        use ClassGroup::*;
        use Sense::*;
        assert_eq!(
            expected_verdict(HighPermeability, Maximize, AB),
            Verdict::Nontrivial
        );
        assert_eq!(
            expected_verdict(HighPermeability, Maximize, CD),
            Verdict::TrivialAllLow
        );
        assert_eq!(
            expected_verdict(HighPermeability, Minimize, AB),
            Verdict::TrivialAllLow
        );
        assert_eq!(
            expected_verdict(HighPermeability, Minimize, CD),
            Verdict::Nontrivial
        );
        assert_eq!(
            expected_verdict(LowPermeability, Maximize, AB),
            Verdict::TrivialAllHigh
        );
        assert_eq!(
            expected_verdict(LowPermeability, Maximize, CD),
            Verdict::Nontrivial
        );
        assert_eq!(
            expected_verdict(LowPermeability, Minimize, AB),
            Verdict::Nontrivial
        );
        assert_eq!(
            expected_verdict(LowPermeability, Minimize, CD),
            Verdict::TrivialAllHigh
        );
    }

    #[test]
    fn projection_respects_volume() {
        let g = make_grid(5, 4, 1.0, 1.0).unwrap();
        let gamma = CellField::constant(&g, 0.4);
        let dir = CellField::from_fn(&g, |x, y| x - 0.3 * y);
        for bound in [
            BoundedMaterial::HighPermeability,
            BoundedMaterial::LowPermeability,
        ] {
            let s = Scenario::new(Sense::Maximize, bound, 0.4);
            let start = if bound == BoundedMaterial::HighPermeability {
                gamma.clone()
            } else {
                CellField::constant(&g, 0.6)
            };
            let next = projected_step(&start, &dir, &s, 0.2);
            assert!(s.bounded_fraction(&next) <= 0.4 + 1e-10);
            assert!(next
                .values
                .iter()
                .zip(&start.values)
                .all(|(a, b)| (a - b).abs() <= 0.2 + 1e-15));
            assert!(next.values.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn class_b_maximize_low_bound_is_all_high() {
        let pb = canonical_ab(8).unwrap();
        let st = optimize(
            &pb,
            &scenario(Sense::Maximize, BoundedMaterial::LowPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(st.verdict, Verdict::TrivialAllHigh);
        assert!(st.history.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }

    #[test]
    fn class_b_maximize_high_bound_is_constrained() {
        let pb = canonical_ab(8).unwrap();
        let st = optimize(
            &pb,
            &scenario(Sense::Maximize, BoundedMaterial::HighPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(st.verdict, Verdict::Nontrivial);
        assert!(
            (st.bounded_fraction - 0.4).abs() <= 0.004,
            "{}",
            st.bounded_fraction
        );
    }

    #[test]
    fn class_d_minimize_high_bound_is_nontrivial() {
        let pb = canonical_cd(8).unwrap();
        let st = optimize(
            &pb,
            &scenario(Sense::Minimize, BoundedMaterial::HighPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(st.verdict, Verdict::Nontrivial);
        assert!(st.constraint_active);
        assert!(st.history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn nonbinding_bound_gives_uniform_design() {
        // (1 - f) * cells stays below the verdict tolerance, so the bound cannot
        // force an intermediate cell
        let params = ScenarioParams {
            volume_fraction: 0.99999,
            ..ScenarioParams::default()
        };
        let table = run_table1(
            &canonical_ab(6).unwrap(),
            &canonical_cd(6).unwrap(),
            &params,
        )
        .unwrap();
        for c in &table.cells {
            let wants_high = matches!(
                (c.sense, c.group),
                (Sense::Maximize, ClassGroup::AB) | (Sense::Minimize, ClassGroup::CD)
            );
            let uniform = if wants_high {
                Verdict::TrivialAllHigh
            } else {
                Verdict::TrivialAllLow
            };
            assert_eq!(
                c.state.verdict, uniform,
                "{:?} {:?} {:?}",
                c.bound, c.sense, c.group
            );
        }
    }

    #[test]
    fn single_cell_saturates_bound() {
        let grid = make_grid(1, 1, 1.0, 1.0).unwrap();
        let pb: FlowProblem = DarcyProblem::new(
            grid,
            CellField::constant(&grid, 1.0),
            1.0,
            BoundarySpec::darcy_channel(1.0, 0.0),
        )
        .into();
        let up = optimize(
            &pb,
            &scenario(Sense::Maximize, BoundedMaterial::HighPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert!((up.gamma.gamma.values[0] - 0.4).abs() < 1e-12);
        let down = optimize(
            &pb,
            &scenario(Sense::Minimize, BoundedMaterial::HighPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(down.verdict, Verdict::TrivialAllLow);
        let up_low = optimize(
            &pb,
            &scenario(Sense::Maximize, BoundedMaterial::LowPermeability),
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(up_low.verdict, Verdict::TrivialAllHigh);
    }

    #[test]
    fn monotone_checks() {
        let b = objective_monotone_check(&canonical_ab(8).unwrap(), &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(b.trend, Trend::Increasing);
        let d = objective_monotone_check(&canonical_cd(8).unwrap(), &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(d.trend, Trend::Decreasing);
        let grid = make_grid(4, 4, 1.0, 1.0).unwrap();
        let rest: FlowProblem = DarcyProblem::new(
            grid,
            CellField::constant(&grid, 1.0),
            1.0,
            BoundarySpec::darcy_channel(0.0, 0.0),
        )
        .into();
        let z = objective_monotone_check(&rest, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(z.trend, Trend::Degenerate);
        let general: FlowProblem = DarcyProblem::new(
            grid,
            CellField::constant(&grid, 1.0),
            1.0,
            BoundarySpec {
                left: BoundaryCondition::NormalVelocity {
                    normal: Profile::Constant(-1.0),
                },
                ..BoundarySpec::darcy_channel(1.0, 2.0)
            },
        )
        .into();
        assert!(matches!(
            objective_monotone_check(&general, &[1.0, 2.0]),
            Err(Error::Unsupported(_))
        ));
    }
}
