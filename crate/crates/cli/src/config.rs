//! JSON run configuration with a strict schema.
//!
//! Every violation is collected with its path before anything is solved.
//! Unknown keys are rejected at every level.

use std::fmt;
use std::path::{Path, PathBuf};

use porous_adjoint::instances::build_problem;
use porous_adjoint::{
    make_grid, BodyForce, BoundaryCondition, BoundarySpec, BoundedMaterial, CellField, FaceField,
    FlowProblem, LinearSolver, ModelForm, OptimizerOptions, Profile, Scenario, Sense, Side,
    SolverOptions, StaggeredGrid,
};
use serde_json::{Map, Value};

use crate::output::read_cell_csv;

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub scenario: Scenario,
    pub options: OptimizerOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelForm,
    pub grid: StaggeredGrid,
    pub mu: f64,
    pub rho: f64,
    pub permeability: CellField,
    pub body_force: BodyForce,
    pub boundaries: BoundarySpec,
    pub design: Option<DesignConfig>,
    pub solver: SolverOptions,
}

impl RunConfig {
    pub fn problem(&self) -> FlowProblem {
        let mut problem = build_problem(
            self.model,
            self.grid,
            self.permeability.clone(),
            self.mu,
            self.boundaries.clone(),
            self.body_force.clone(),
        );
        match &mut problem {
            FlowProblem::Darcy(p) => p.solver = self.solver,
            FlowProblem::Brinkman(p) => p.solver = self.solver,
        }
        problem
    }
}

/// One schema violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// The text is not JSON.
    Syntax(String),
    /// The JSON does not satisfy the schema.
    Invalid(Vec<Violation>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax(m) => write!(f, "config is not valid JSON: {m}"),
            ConfigError::Invalid(v) => {
                write!(f, "config has {} error(s):", v.len())?;
                for e in v {
                    write!(f, "\n  {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses and validates a configuration. Relative permeability file paths
/// are resolved against `base_dir`.
pub fn parse_config(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut w = Walker {
        errors: Vec::new(),
        base_dir: base_dir.map(Path::to_path_buf),
    };
    let config = w.run_config(&value);
    match config {
        Some(c) if w.errors.is_empty() => Ok(c),
        _ => Err(ConfigError::Invalid(w.errors)),
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError::Invalid(vec![Violation {
            path: path.display().to_string(),
            message: e.to_string(),
        }])
    })?;
    parse_config(&text, path.parent())
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

struct Walker {
    errors: Vec<Violation>,
    base_dir: Option<PathBuf>,
}

impl Walker {
    fn error(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(Violation {
            path: if path.is_empty() {
                "<root>".into()
            } else {
                path.into()
            },
            message: message.into(),
        });
    }

    fn object<'a>(
        &mut self,
        v: &'a Value,
        path: &str,
        allowed: &[&str],
    ) -> Option<&'a Map<String, Value>> {
        let Some(map) = v.as_object() else {
            self.error(path, "expected an object");
            return None;
        };
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.error(
                    &join(path, key),
                    format!("unknown key (allowed: {})", allowed.join(", ")),
                );
            }
        }
        Some(map)
    }

    fn required<'a>(
        &mut self,
        map: &'a Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<&'a Value> {
        let v = map.get(key);
        if v.is_none() {
            self.error(&join(path, key), "required but missing");
        }
        v
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.error(path, "expected a finite number");
                None
            }
        }
    }

    fn positive(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = self.number(v, path)?;
        if x <= 0.0 {
            self.error(path, format!("must be positive, got {x}"));
            return None;
        }
        Some(x)
    }

    fn count(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64() {
            Some(n) if n > 0 => Some(n as usize),
            _ => {
                self.error(path, "expected a positive integer");
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        let b = v.as_bool();
        if b.is_none() {
            self.error(path, "expected true or false");
        }
        b
    }

    fn string<'a>(&mut self, v: &'a Value, path: &str, choices: &[&str]) -> Option<&'a str> {
        match v.as_str() {
            Some(s) if choices.contains(&s) => Some(s),
            _ => {
                self.error(path, format!("expected one of {}", choices.join(", ")));
                None
            }
        }
    }

    /// A list of finite numbers whose length is one of `lengths` (any length if `None`).
    fn numbers(&mut self, v: &Value, path: &str, lengths: Option<&[usize]>) -> Option<Vec<f64>> {
        let Some(items) = v.as_array() else {
            self.error(path, "expected an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            match self.number(item, &format!("{path}[{i}]")) {
                Some(x) => out.push(x),
                None => ok = false,
            }
        }
        if let Some(lengths) = lengths {
            if !lengths.contains(&out.len()) {
                let expected: Vec<String> = lengths.iter().map(usize::to_string).collect();
                self.error(
                    path,
                    format!(
                        "expected {} values, got {}",
                        expected.join(" or "),
                        items.len()
                    ),
                );
                ok = false;
            }
        }
        ok.then_some(out)
    }

    /// A constant or a per-face (`n`) or per-node (`n + 1`) list.
    fn profile(&mut self, v: Option<&Value>, path: &str, n: Option<usize>) -> Option<Profile> {
        match v {
            None => Some(Profile::Constant(0.0)),
            Some(v) if v.is_array() => {
                let lengths = n.map(|n| [n, n + 1]);
                self.numbers(v, path, lengths.as_ref().map(|l| &l[..]))
                    .map(Profile::Values)
            }
            Some(v) => self.number(v, path).map(Profile::Constant),
        }
    }

    fn run_config(&mut self, v: &Value) -> Option<RunConfig> {
        let root = self.object(
            v,
            "",
            &[
                "model",
                "grid",
                "fluid",
                "permeability",
                "body_force",
                "boundaries",
                "design",
                "solver",
            ],
        )?;
        let model = self.required(root, "", "model").and_then(|m| {
            self.string(m, "model", &["darcy", "brinkman", "brinkman_traction"])
                .map(|s| match s {
                    "darcy" => ModelForm::Darcy,
                    "brinkman" => ModelForm::BrinkmanMain,
                    _ => ModelForm::BrinkmanTraction,
                })
        });
        let grid = self.required(root, "", "grid").and_then(|g| self.grid(g));
        let (mu, rho) = match self.required(root, "", "fluid") {
            Some(f) => self.fluid(f),
            None => (None, None),
        };
        let permeability = self
            .required(root, "", "permeability")
            .and_then(|k| self.permeability(k, grid.as_ref()));
        let body_force = match root.get("body_force") {
            Some(b) => self.body_force(b, grid.as_ref(), rho.unwrap_or(1.0)),
            None => Some(BodyForce::None),
        };
        let boundaries = self
            .required(root, "", "boundaries")
            .and_then(|b| self.boundaries(b, grid.as_ref(), model));
        let design = match root.get("design") {
            Some(d) => self.design(d).map(Some),
            None => Some(None),
        };
        let solver = match root.get("solver") {
            Some(s) => self.solver(s),
            None => Some(SolverOptions::default()),
        };
        Some(RunConfig {
            model: model?,
            grid: grid?,
            mu: mu?,
            rho: rho?,
            permeability: permeability?,
            body_force: body_force?,
            boundaries: boundaries?,
            design: design?,
            solver: solver?,
        })
    }

    fn grid(&mut self, v: &Value) -> Option<StaggeredGrid> {
        let map = self.object(v, "grid", &["nx", "ny", "lx", "ly"])?;
        let nx = self
            .required(map, "grid", "nx")
            .and_then(|x| self.count(x, "grid.nx"));
        let ny = self
            .required(map, "grid", "ny")
            .and_then(|x| self.count(x, "grid.ny"));
        let lx = match map.get("lx") {
            Some(x) => self.positive(x, "grid.lx"),
            None => Some(1.0),
        };
        let ly = match map.get("ly") {
            Some(x) => self.positive(x, "grid.ly"),
            None => Some(1.0),
        };
        match make_grid(nx?, ny?, lx?, ly?) {
            Ok(g) => Some(g),
            Err(e) => {
                self.error("grid", e.to_string());
                None
            }
        }
    }

    fn fluid(&mut self, v: &Value) -> (Option<f64>, Option<f64>) {
        let Some(map) = self.object(v, "fluid", &["mu", "rho"]) else {
            return (None, None);
        };
        let mu = self
            .required(map, "fluid", "mu")
            .and_then(|m| self.positive(m, "fluid.mu"));
        let rho = match map.get("rho") {
            Some(r) => self.positive(r, "fluid.rho"),
            None => Some(1.0),
        };
        (mu, rho)
    }

    fn permeability(&mut self, v: &Value, grid: Option<&StaggeredGrid>) -> Option<CellField> {
        let map = self.object(v, "permeability", &["uniform", "values", "file"])?;
        if map.len() != 1 {
            self.error("permeability", "give exactly one of uniform, values, file");
            return None;
        }
        let n = grid.map(StaggeredGrid::n_cells);
        let values = if let Some(u) = map.get("uniform") {
            let k = self.positive(u, "permeability.uniform")?;
            vec![k; n?]
        } else if let Some(vals) = map.get("values") {
            let lengths = n.map(|n| [n]);
            self.numbers(
                vals,
                "permeability.values",
                lengths.as_ref().map(|l| &l[..]),
            )?
        } else {
            let file = map.get("file")?;
            let Some(name) = file.as_str() else {
                self.error("permeability.file", "expected a path");
                return None;
            };
            let path = match &self.base_dir {
                Some(base) if Path::new(name).is_relative() => base.join(name),
                _ => PathBuf::from(name),
            };
            match read_cell_csv(&path) {
                Ok(v) => {
                    if let Some(n) = n {
                        if v.len() != n {
                            self.error(
                                "permeability.file",
                                format!("expected {n} values, {} has {}", path.display(), v.len()),
                            );
                            return None;
                        }
                    }
                    v
                }
                Err(e) => {
                    self.error(
                        "permeability.file",
                        format!("cannot read {}: {e}", path.display()),
                    );
                    return None;
                }
            }
        };
        if let Some((c, k)) = values
            .iter()
            .enumerate()
            .find(|(_, k)| !(**k > 0.0 && k.is_finite()))
        {
            self.error(
                "permeability",
                format!("must be positive and finite, cell {c} has {k}"),
            );
            return None;
        }
        grid?;
        Some(CellField::new(values))
    }

    fn body_force(
        &mut self,
        v: &Value,
        grid: Option<&StaggeredGrid>,
        rho: f64,
    ) -> Option<BodyForce> {
        let map = self.object(v, "body_force", &["type", "x", "y", "values"])?;
        let kind = self.required(map, "body_force", "type")?;
        let kind = self.string(kind, "body_force.type", &["none", "vector", "potential"])?;
        let stray: Vec<&str> = match kind {
            "none" => vec!["x", "y", "values"],
            "vector" => vec!["values"],
            _ => vec!["x", "y"],
        };
        for key in stray {
            if map.contains_key(key) {
                self.error(
                    &join("body_force", key),
                    format!("not used by a {kind} body force"),
                );
            }
        }
        match kind {
            "none" => Some(BodyForce::None),
            "vector" => {
                let component = |w: &mut Self, key: &str, n: Option<usize>| -> Option<Vec<f64>> {
                    let path = join("body_force", key);
                    match map.get(key) {
                        None => n.map(|n| vec![0.0; n]),
                        Some(c) if c.is_array() => {
                            let lengths = n.map(|n| [n]);
                            w.numbers(c, &path, lengths.as_ref().map(|l| &l[..]))
                        }
                        Some(c) => {
                            let x = w.number(c, &path)?;
                            n.map(|n| vec![x; n])
                        }
                    }
                };
                let x = component(self, "x", grid.map(StaggeredGrid::n_xfaces));
                let y = component(self, "y", grid.map(StaggeredGrid::n_yfaces));
                let scale = |v: Vec<f64>| v.into_iter().map(|b| rho * b).collect();
                Some(BodyForce::Vector(FaceField::new(scale(x?), scale(y?))))
            }
            _ => {
                let n = grid.map(StaggeredGrid::n_cells);
                let vals = self.required(map, "body_force", "values")?;
                let lengths = n.map(|n| [n]);
                let psi =
                    self.numbers(vals, "body_force.values", lengths.as_ref().map(|l| &l[..]))?;
                Some(BodyForce::Potential(CellField::new(psi)))
            }
        }
    }

    fn boundaries(
        &mut self,
        v: &Value,
        grid: Option<&StaggeredGrid>,
        model: Option<ModelForm>,
    ) -> Option<BoundarySpec> {
        let map = self.object(v, "boundaries", &["left", "right", "bottom", "top"])?;
        let mut sides = Vec::new();
        for side in Side::ALL {
            let path = join("boundaries", side.name());
            let cond = self
                .required(map, "boundaries", side.name())
                .and_then(|c| self.side(c, &path, grid.map(|g| g.side_len(side)), model));
            sides.push(cond);
        }
        let mut it = sides.into_iter();
        let (left, right, bottom, top) = (it.next()??, it.next()??, it.next()??, it.next()??);
        Some(BoundarySpec {
            left,
            right,
            bottom,
            top,
        })
    }

    fn side(
        &mut self,
        v: &Value,
        path: &str,
        n: Option<usize>,
        model: Option<ModelForm>,
    ) -> Option<BoundaryCondition> {
        let map = self.object(v, path, &["type", "value", "normal", "tangential"])?;
        let kind = self.required(map, path, "type")?;
        let kind = self
            .string(
                &kind.clone(),
                &join(path, "type"),
                &[
                    "pressure",
                    "normal_velocity",
                    "velocity",
                    "wall",
                    "traction",
                ],
            )?
            .to_string();
        if let Some(model) = model {
            let allowed: &[&str] = match model {
                ModelForm::Darcy => &["pressure", "normal_velocity", "wall"],
                ModelForm::BrinkmanMain => &["pressure", "velocity", "wall"],
                ModelForm::BrinkmanTraction => &["traction", "velocity", "wall"],
            };
            if !allowed.contains(&kind.as_str()) {
                let name = match model {
                    ModelForm::Darcy => "darcy",
                    ModelForm::BrinkmanMain => "brinkman",
                    ModelForm::BrinkmanTraction => "brinkman_traction",
                };
                self.error(
                    &join(path, "type"),
                    format!(
                        "'{kind}' is not allowed for model {name} (allowed: {})",
                        allowed.join(", ")
                    ),
                );
                return None;
            }
        }
        let used: &[&str] = match kind.as_str() {
            "pressure" => &["value", "tangential"],
            "normal_velocity" => &["value"],
            "wall" => &[],
            _ => &["normal", "tangential"],
        };
        for key in ["value", "normal", "tangential"] {
            if map.contains_key(key) && !used.contains(&key) {
                self.error(&join(path, key), format!("not used by a {kind} boundary"));
            }
        }
        let field = |w: &mut Self, key: &str| w.profile(map.get(key), &join(path, key), n);
        match kind.as_str() {
            "pressure" => {
                if !map.contains_key("value") {
                    self.error(&join(path, "value"), "required but missing");
                }
                let pressure = field(self, "value");
                let tangential = field(self, "tangential");
                Some(BoundaryCondition::Pressure {
                    pressure: pressure?,
                    tangential: tangential?,
                })
            }
            "normal_velocity" => Some(BoundaryCondition::NormalVelocity {
                normal: field(self, "value")?,
            }),
            "wall" => Some(match model {
                Some(ModelForm::Darcy) | None => BoundaryCondition::wall(),
                _ => BoundaryCondition::no_slip(),
            }),
            "velocity" => {
                let normal = field(self, "normal");
                let tangential = field(self, "tangential");
                Some(BoundaryCondition::FullVelocity {
                    normal: normal?,
                    tangential: tangential?,
                })
            }
            _ => {
                let normal = field(self, "normal");
                let tangential = field(self, "tangential");
                Some(BoundaryCondition::Traction {
                    normal: normal?,
                    tangential: tangential?,
                })
            }
        }
    }

    fn design(&mut self, v: &Value) -> Option<DesignConfig> {
        let path = "design";
        let map = self.object(
            v,
            path,
            &[
                "sense",
                "bound",
                "volume_fraction",
                "k_low",
                "k_high",
                "q",
                "max_iters",
                "move_limit",
                "step_tolerance",
                "filter",
            ],
        )?;
        let sense = self.required(map, path, "sense").and_then(|s| {
            self.string(s, "design.sense", &["maximize", "minimize"])
                .map(|s| {
                    if s == "maximize" {
                        Sense::Maximize
                    } else {
                        Sense::Minimize
                    }
                })
        });
        let bound = self.required(map, path, "bound").and_then(|s| {
            self.string(s, "design.bound", &["high", "low"]).map(|s| {
                if s == "high" {
                    BoundedMaterial::HighPermeability
                } else {
                    BoundedMaterial::LowPermeability
                }
            })
        });
        let fraction = self.required(map, path, "volume_fraction").and_then(|f| {
            let x = self.number(f, "design.volume_fraction")?;
            if !(x > 0.0 && x < 1.0) {
                self.error(
                    "design.volume_fraction",
                    format!("must lie in (0, 1), got {x}"),
                );
                return None;
            }
            Some(x)
        });
        let defaults = Scenario::new(Sense::Maximize, BoundedMaterial::HighPermeability, 0.5);
        let opt = |w: &mut Self, key: &str, default: f64| match map.get(key) {
            Some(x) => w.positive(x, &join(path, key)),
            None => Some(default),
        };
        let k_low = opt(self, "k_low", defaults.k_low);
        let k_high = opt(self, "k_high", defaults.k_high);
        let q = opt(self, "q", defaults.q);
        let base = OptimizerOptions::default();
        let move_limit = opt(self, "move_limit", base.move_limit);
        let step_tol = opt(self, "step_tolerance", base.step_tol);
        if let (Some(lo), Some(hi)) = (k_low, k_high) {
            if lo >= hi {
                self.error(
                    "design.k_low",
                    format!("must be below k_high ({lo} >= {hi})"),
                );
            }
        }
        if let Some(m) = move_limit {
            if m > 1.0 {
                self.error("design.move_limit", format!("must not exceed 1, got {m}"));
            }
        }
        let max_iters = match map.get("max_iters") {
            Some(x) => self.count(x, "design.max_iters"),
            None => Some(base.max_iters),
        };
        let filter = match map.get("filter") {
            Some(x) => self.boolean(x, "design.filter"),
            None => Some(false),
        };
        let scenario = Scenario {
            sense: sense?,
            bound: bound?,
            volume_fraction: fraction?,
            k_low: k_low?,
            k_high: k_high?,
            q: q?,
        };
        scenario.validate().ok()?;
        Some(DesignConfig {
            scenario,
            options: OptimizerOptions {
                max_iters: max_iters?,
                move_limit: move_limit?.min(1.0),
                step_tol: step_tol?,
                filter: filter?,
            },
        })
    }

    fn solver(&mut self, v: &Value) -> Option<SolverOptions> {
        let map = self.object(v, "solver", &["tolerance", "max_iterations", "method"])?;
        let defaults = SolverOptions::default();
        let tolerance = match map.get("tolerance") {
            Some(t) => self.positive(t, "solver.tolerance"),
            None => Some(defaults.tolerance),
        };
        let max_iterations = match map.get("max_iterations") {
            Some(Value::Null) | None => Some(None),
            Some(x) => self.count(x, "solver.max_iterations").map(Some),
        };
        let method = match map.get("method") {
            Some(m) => self
                .string(m, "solver.method", &["auto", "direct", "iterative"])
                .map(|s| match s {
                    "direct" => LinearSolver::Direct,
                    "iterative" => LinearSolver::Iterative,
                    _ => LinearSolver::Auto,
                }),
            None => Some(defaults.method),
        };
        Some(SolverOptions {
            tolerance: tolerance?,
            max_iterations: max_iterations?,
            method: method?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const CHANNEL: &str = r#"{
        "model": "darcy",
        "grid": {"nx": 8, "ny": 1, "lx": 1.0, "ly": 1.0},
        "fluid": {"mu": 1.0},
        "permeability": {"uniform": 1.0},
        "boundaries": {
            "left": {"type": "pressure", "value": 1.0},
            "right": {"type": "pressure", "value": 0.0},
            "bottom": {"type": "wall"},
            "top": {"type": "wall"}
        }
    }"#;

    fn violations(text: &str) -> Vec<Violation> {
        match parse_config(text, None) {
            Err(ConfigError::Invalid(v)) => v,
            other => panic!("expected schema violations, got {other:?}"),
        }
    }

    #[test]
    fn minimal_channel_gets_defaults() {
        let c = parse_config(CHANNEL, None).unwrap();
        assert_eq!(c.solver.tolerance, 1e-10);
        assert_eq!(c.rho, 1.0);
        assert_eq!(c.body_force, BodyForce::None);
        assert_eq!(c.grid.n_cells(), 8);
        assert!(c.design.is_none());
        assert_eq!(c.boundaries, BoundarySpec::darcy_channel(1.0, 0.0));
    }

    #[test]
    fn missing_boundaries_is_named() {
        let mut v: Value = serde_json::from_str(CHANNEL).unwrap();
        v.as_object_mut().unwrap().remove("boundaries");
        let errs = violations(&v.to_string());
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].path, "boundaries");
    }

    #[test]
    fn negative_viscosity_has_path() {
        let text = CHANNEL.replace(r#""mu": 1.0"#, r#""mu": -1"#);
        let errs = violations(&text);
        assert_eq!(errs[0].path, "fluid.mu");
    }

    #[test]
    fn all_violations_are_reported() {
        let text = CHANNEL
            .replace(r#""mu": 1.0"#, r#""mu": 0"#)
            .replace(r#""uniform": 1.0"#, r#""uniform": -2"#)
            .replace(r#""type": "wall"}"#, r#""type": "traction"}"#)
            .replace(r#""model": "darcy","#, r#""model": "darcy", "colour": 1,"#);
        let paths: Vec<String> = violations(&text).into_iter().map(|v| v.path).collect();
        for expected in [
            "colour",
            "fluid.mu",
            "permeability.uniform",
            "boundaries.bottom.type",
            "boundaries.top.type",
        ] {
            assert!(
                paths.iter().any(|p| p == expected),
                "{expected} not in {paths:?}"
            );
        }
    }

    #[test]
    fn syntax_errors_are_distinguished() {
        assert!(matches!(
            parse_config("{", None),
            Err(ConfigError::Syntax(_))
        ));
    }

    #[test]
    fn profiles_and_forces() {
        let text = r#"{
            "model": "brinkman",
            "grid": {"nx": 2, "ny": 2},
            "fluid": {"mu": 2.0, "rho": 3.0},
            "permeability": {"values": [1, 2, 3, 4]},
            "body_force": {"type": "vector", "x": 1.0, "y": [0, 0, 0, 0, 0, 1]},
            "boundaries": {
                "left": {"type": "velocity", "normal": [-1, -1], "tangential": 0},
                "right": {"type": "velocity", "normal": [1, 1, 1]},
                "bottom": {"type": "wall"},
                "top": {"type": "pressure", "value": 0, "tangential": [0, 0]}
            },
            "solver": {"method": "direct", "tolerance": 1e-9}
        }"#;
        let c = parse_config(text, None).unwrap();
        assert_eq!(c.model, ModelForm::BrinkmanMain);
        let BodyForce::Vector(f) = &c.body_force else {
            panic!()
        };
        assert_eq!(f.x, vec![3.0; 6]);
        assert_eq!(f.y[5], 3.0);
        assert_eq!(c.boundaries.bottom, BoundaryCondition::no_slip());
        assert_eq!(c.solver.method, LinearSolver::Direct);
        let bad = text.replace("[1, 1, 1]", "[1, 1, 1, 1]");
        assert_eq!(violations(&bad)[0].path, "boundaries.right.normal");
    }

    #[test]
    fn design_block() {
        let mut v: Value = serde_json::from_str(CHANNEL).unwrap();
        v["design"] = serde_json::json!({"sense": "minimize", "bound": "low", "volume_fraction": 0.3, "max_iters": 50});
        let c = parse_config(&v.to_string(), None).unwrap();
        let d = c.design.unwrap();
        assert_eq!(d.scenario.sense, Sense::Minimize);
        assert_eq!(d.scenario.bound, BoundedMaterial::LowPermeability);
        assert_eq!(d.options.max_iters, 50);
        v["design"]["volume_fraction"] = serde_json::json!(1.5);
        assert_eq!(violations(&v.to_string())[0].path, "design.volume_fraction");
    }
}
