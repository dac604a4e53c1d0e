//! Problem files, run configuration and outcome serialization.
//!
//! A problem file is JSON in one of two shapes, selected by `kind`:
//!
//! ```json
//! {"kind": "sip",
//!  "x_box": {"lower": [-2], "upper": [2]},
//!  "y_box": {"lower": [0], "upper": [1]},
//!  "objective": {"q": [[2]], "c": [0], "d": 0},
//!  "constraints": [{"x_coeffs": [[{"exps": [0], "coef": 1}]],
//!                   "offset": [{"exps": [0], "coef": -1}, {"exps": [1], "coef": 1}]}],
//!  "slater_point": [-2]}
//! ```
//!
//! ```json
//! {"kind": "regression",
//!  "data": [{"u": [0], "t": 1}, {"u": [1], "t": 0}],
//!  "degree": 1,
//!  "u_box": {"lower": [0], "upper": [1]},
//!  "w_box": {"lower": [-10, -10], "upper": [10, 10]},
//!  "ridge": 1e-6,
//!  "constraints": [{"weights": [{"alpha": [1], "c": -1}], "offset": 0}]}
//! ```
//!
//! `kind` defaults to `sip`. Regression data may come from a CSV file
//! (`data_csv`, relative to the problem file) instead of `data`. The string
//! `builtin:NAME` names a built-in instance instead of a file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::core_loop::{run_core, CoreConfig, CoreStatus};
use crate::discretization::Discretization;
use crate::drivers::{
    run_sequential, run_simultaneous, DriverBudget, IterationCounts, OutcomeStatus,
    SequentialConfig, SimultaneousConfig, SolveOutcome,
};
use crate::error::{config, invalid, Result, SipError};
use crate::instances;
use crate::poly::{Polynomial, Term};
use crate::problem::{
    default_margin_resolution, feasibility_margin, AffinePolyConstraint, BoxDomain,
    ConstraintFamily, QuadraticObjective, SipProblem,
};
use crate::regression::{self, RegressionSpec, ShapeConstraint};
use crate::schedule::{AuxSchedule, ObjSchedule, Regime, ToleranceSchedule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxSpec {
    fn build(&self, field: &str) -> Result<BoxDomain> {
        BoxDomain::new(self.lower.clone(), self.upper.clone())
            .map_err(|e| schema(field, e.to_string()))
    }

    fn from_domain(b: &BoxDomain) -> Self {
        Self {
            lower: b.lower().to_vec(),
            upper: b.upper().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub q: Vec<Vec<f64>>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub d: f64,
    /// Max-norm Lipschitz constant on the x-box; computed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePolySpec {
    /// One polynomial in `y` per component of `x`.
    pub x_coeffs: Vec<Vec<Term>>,
    pub offset: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SipFile {
    pub x_box: BoxSpec,
    pub y_box: BoxSpec,
    pub objective: QuadraticSpec,
    pub constraints: Vec<AffinePolySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_point: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPoint {
    pub u: Vec<f64>,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub alpha: Vec<u32>,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub weights: Vec<WeightSpec>,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<DataPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_csv: Option<PathBuf>,
    pub degree: u32,
    pub u_box: BoxSpec,
    pub w_box: BoxSpec,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    pub constraints: Vec<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slater_point: Option<Vec<f64>>,
}

fn default_ridge() -> f64 {
    regression::DEFAULT_RIDGE
}

fn schema(field: &str, message: impl Into<String>) -> SipError {
    SipError::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_as<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(
            if path == "." { "<root>" } else { &path },
            e.into_inner().to_string(),
        )
    })
}

fn poly_from(dim: usize, terms: &[Term], field: &str) -> Result<Polynomial> {
    Polynomial::from_terms(dim, terms.iter().map(|t| (t.exps.clone(), t.coef)))
        .map_err(|e| schema(field, e.to_string()))
}

impl SipFile {
    pub fn build(&self) -> Result<SipProblem> {
        let x = self.x_box.build("x_box")?;
        let y = self.y_box.build("y_box")?;
        let q = &self.objective;
        if q.c.len() != x.dim() {
            return Err(schema(
                "objective.c",
                format!("expected {} entries, got {}", x.dim(), q.c.len()),
            ));
        }
        let mut f = match QuadraticObjective::new(q.q.clone(), q.c.clone(), q.d) {
            Ok(f) => f,
            Err(SipError::InvalidInput(m)) => return Err(schema("objective.q", m)),
            Err(e) => return Err(e),
        };
        f = match q.lipschitz {
            Some(l) => f.with_lipschitz(l),
            None => f.bounded_on(&x),
        };
        let mut families: Vec<Arc<dyn ConstraintFamily>> = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let field = format!("constraints[{i}]");
            if c.x_coeffs.len() != x.dim() {
                return Err(schema(
                    &format!("{field}.x_coeffs"),
                    format!("expected {} polynomials, got {}", x.dim(), c.x_coeffs.len()),
                ));
            }
            let coeffs = c
                .x_coeffs
                .iter()
                .enumerate()
                .map(|(k, t)| poly_from(y.dim(), t, &format!("{field}.x_coeffs[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            let offset = poly_from(y.dim(), &c.offset, &format!("{field}.offset"))?;
            let g = AffinePolyConstraint::new(coeffs, offset, &x, &y)
                .map_err(|e| schema(&field, e.to_string()))?;
            families.push(Arc::new(g));
        }
        if families.is_empty() {
            return Err(schema(
                "constraints",
                "at least one constraint family is required",
            ));
        }
        let p = SipProblem::new(x, y, Arc::new(f), families)?;
        match &self.slater_point {
            Some(s) => p.with_slater_point(s.clone()),
            None => Ok(p),
        }
    }
}

impl RegressionFile {
    pub fn spec(&self, base_dir: Option<&Path>) -> Result<RegressionSpec> {
        let u_domain = self.u_box.build("u_box")?;
        let coeff_box = self.w_box.build("w_box")?;
        let data = match (&self.data, &self.data_csv) {
            (Some(d), None) => d.iter().map(|p| (p.u.clone(), p.t)).collect(),
            (None, Some(path)) => {
                let path = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                let file = fs::File::open(&path)?;
                regression::read_data_csv(file, u_domain.dim())?
            }
            _ => {
                return Err(schema(
                    "data",
                    "exactly one of `data` and `data_csv` is required",
                ))
            }
        };
        let shape_constraints = self
            .constraints
            .iter()
            .map(|c| ShapeConstraint {
                weights: c.weights.iter().map(|w| (w.alpha.clone(), w.c)).collect(),
                offset: c.offset,
            })
            .collect();
        Ok(RegressionSpec {
            data,
            degree: self.degree,
            coeff_box,
            ridge: self.ridge,
            shape_constraints,
            u_domain,
            slater_point: self.slater_point.clone(),
        })
    }
}

/// Parses problem JSON. `base_dir` resolves relative CSV paths.
pub fn parse_problem(text: &str, base_dir: Option<&Path>) -> Result<SipProblem> {
    let mut value: Value = serde_json::from_str(text)?;
    let kind = match value.as_object_mut() {
        Some(obj) => match obj.remove("kind") {
            None => "sip".to_string(),
            Some(Value::String(s)) => s,
            Some(_) => return Err(schema("kind", "must be a string")),
        },
        None => return Err(schema("<root>", "problem file must be a JSON object")),
    };
    match kind.as_str() {
        "sip" => parse_as::<SipFile>(value)?.build(),
        "regression" => {
            regression::build_problem(&parse_as::<RegressionFile>(value)?.spec(base_dir)?)
        }
        other => Err(schema(
            "kind",
            format!("unknown kind `{other}`, expected `sip` or `regression`"),
        )),
    }
}

/// Loads `builtin:NAME` or a JSON problem file.
pub fn load_problem(path: &str) -> Result<SipProblem> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return instances::builtin(name).ok_or_else(|| {
            invalid(format!(
                "unknown builtin `{name}`; available: {}",
                instances::BUILTIN_NAMES.join(", ")
            ))
        });
    }
    let text = fs::read_to_string(path)?;
    parse_problem(&text, Path::new(path).parent())
}

fn terms_of(p: &Polynomial) -> Vec<Term> {
    p.terms().to_vec()
}

/// The problem as a [`SipFile`]; needs a quadratic objective and
/// polynomial families.
pub fn to_sip_file(p: &SipProblem) -> Result<SipFile> {
    let quad = p
        .objective()
        .as_quadratic()
        .ok_or_else(|| invalid("only quadratic objectives can be serialized"))?;
    let constraints = p
        .constraints()
        .iter()
        .map(|c| {
            let a = c
                .as_affine_poly()
                .ok_or_else(|| invalid("only polynomial constraint families can be serialized"))?;
            Ok(AffinePolySpec {
                x_coeffs: a.x_coeffs().iter().map(terms_of).collect(),
                offset: terms_of(a.offset()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SipFile {
        x_box: BoxSpec::from_domain(p.x_domain()),
        y_box: BoxSpec::from_domain(p.y_domain()),
        objective: QuadraticSpec {
            q: quad.matrix().to_vec(),
            c: quad.linear().to_vec(),
            d: quad.constant(),
            lipschitz: p.objective().lipschitz_constant(),
        },
        constraints,
        slater_point: p.slater_point().map(<[f64]>::to_vec),
    })
}

pub fn serialize_problem(p: &SipProblem) -> Result<String> {
    let mut v = serde_json::to_value(to_sip_file(p)?)?;
    if let Some(obj) = v.as_object_mut() {
        obj.insert("kind".into(), json!("sip"));
    }
    Ok(serde_json::to_string_pretty(&v)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Core,
    Sequential,
    Simultaneous,
}

impl FromStr for Algorithm {
    type Err = SipError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Self::Core),
            "sequential" => Ok(Self::Sequential),
            "simultaneous" => Ok(Self::Simultaneous),
            _ => Err(config(format!(
                "unknown algorithm `{s}`, expected core, sequential or simultaneous"
            ))),
        }
    }
}

/// Parses `inf`/`infinity` or a nonnegative number.
pub fn parse_rho(s: &str) -> Result<f64> {
    let v = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => f64::INFINITY,
        t => t
            .parse::<f64>()
            .map_err(|_| config(format!("invalid rho `{s}`")))?,
    };
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(config(format!("rho must be >= 0 or infinite, got {s}")))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub delta: f64,
    pub rho: f64,
    pub r: f64,
    /// Restriction level of the core loop, or the initial level of the drivers.
    pub eps0: f64,
    /// `None` picks a schedule valid for the chosen algorithm and `rho`.
    pub schedule: Option<ObjSchedule>,
    pub max_iters: usize,
    pub max_finite_calls: u64,
    pub trace_out: Option<PathBuf>,
    pub outcome_out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Sequential,
            delta: 1e-2,
            rho: f64::INFINITY,
            r: 2.0,
            eps0: 1.0,
            schedule: None,
            max_iters: 10_000,
            max_finite_calls: 1_000_000,
            trace_out: None,
            outcome_out: None,
        }
    }
}

impl RunConfig {
    /// The objective schedule: the given one, or `geometric(0.5)` scaled to
    /// stay below `delta/4`, or zero when `rho = 0` forbids summable ones.
    pub fn objective_schedule(&self) -> ObjSchedule {
        if let Some(s) = &self.schedule {
            return s.clone();
        }
        if self.rho == 0.0 {
            ObjSchedule::zero()
        } else {
            ObjSchedule::geometric(0.1f64.min(0.25 * self.delta), 0.5)
        }
    }

    pub fn tolerance_schedule(&self) -> ToleranceSchedule {
        ToleranceSchedule::new(self.objective_schedule(), AuxSchedule::default())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(config(format!("delta must be > 0, got {}", self.delta)));
        }
        if !(self.r > 1.0) {
            return Err(config(format!("r must be > 1, got {}", self.r)));
        }
        if !(self.eps0 >= 0.0 && self.eps0.is_finite()) {
            return Err(config(format!("eps0 must be >= 0, got {}", self.eps0)));
        }
        if !(self.rho >= 0.0) {
            return Err(config(format!(
                "rho must be >= 0 or infinite, got {}",
                self.rho
            )));
        }
        let sched = self.tolerance_schedule();
        sched.validate()?;
        if sched.regime() == Regime::Summable && self.rho == 0.0 {
            return Err(config("a summable objective schedule requires rho != 0"));
        }
        Ok(())
    }

    fn budget(&self) -> DriverBudget {
        DriverBudget {
            max_iters: self.max_iters,
            max_finite_calls: self.max_finite_calls,
            margin_resolution: None,
        }
    }
}

/// Runs the configured algorithm and writes the requested artifacts.
pub fn run(cfg: &RunConfig, problem: &SipProblem) -> Result<SolveOutcome> {
    cfg.validate()?;
    let outcome = match cfg.algorithm {
        Algorithm::Core => run_core_outcome(cfg, problem)?,
        Algorithm::Sequential => {
            let mut s = SequentialConfig::new(problem, cfg.delta)?;
            s.r = cfg.r;
            s.eps00 = cfg.eps0;
            s.rho = cfg.rho;
            s.schedule = cfg.tolerance_schedule();
            run_sequential(problem, &s, &cfg.budget())?
        }
        Algorithm::Simultaneous => {
            let s = SimultaneousConfig::new(
                cfg.delta,
                None,
                cfg.r,
                cfg.eps0,
                Discretization::empty(),
                Discretization::empty(),
                cfg.tolerance_schedule(),
                cfg.rho,
            )?;
            run_simultaneous(problem, &s, &cfg.budget())?
        }
    };
    if let Some(path) = &cfg.trace_out {
        outcome.trace.write_csv(fs::File::create(path)?)?;
    }
    if let Some(path) = &cfg.outcome_out {
        fs::write(path, outcome_json(&outcome, cfg.algorithm) + "\n")?;
    }
    Ok(outcome)
}

fn run_core_outcome(cfg: &RunConfig, problem: &SipProblem) -> Result<SolveOutcome> {
    let mut core = CoreConfig::new(
        cfg.eps0,
        cfg.rho,
        cfg.tolerance_schedule(),
        Discretization::empty(),
    );
    core.max_iters = cfg.max_iters;
    let run = run_core(problem, &core)?;
    let (status, x) = match &run.status {
        CoreStatus::Terminated { x, .. } => (OutcomeStatus::Terminated, Some(x.clone())),
        CoreStatus::InfeasibleSubproblem { .. } => {
            (OutcomeStatus::InfeasibleSubproblem, run.last_x.clone())
        }
        CoreStatus::Budget => (OutcomeStatus::BudgetExceeded, run.last_x.clone()),
    };
    let (f_value, margin) = match &x {
        Some(x) => (
            problem.objective().value(x),
            feasibility_margin(problem, x, default_margin_resolution(problem.y_domain()))?,
        ),
        None => (f64::NAN, f64::NAN),
    };
    let n = run.trace.len();
    Ok(SolveOutcome {
        status,
        x_star: x,
        f_value,
        feasibility_margin: margin,
        certified_violation: f64::NAN,
        eps_terminal: cfg.eps0,
        iterations: IterationCounts {
            outer: 1,
            inner: n,
            per_level: vec![n],
        },
        oracle_evals: run.oracle_evals,
        check_point: None,
        trace: run.trace,
    })
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Outcome JSON with keys `status, x, f, feasibility_margin,
/// outer_iterations, inner_iterations, oracle_evals` plus run details.
pub fn outcome_json(o: &SolveOutcome, algorithm: Algorithm) -> String {
    let v = json!({
        "status": o.status,
        "x": o.x_star.as_ref().map(|x| x.iter().map(|&v| num(v)).collect::<Vec<_>>()),
        "f": num(o.f_value),
        "feasibility_margin": num(o.feasibility_margin),
        "outer_iterations": o.iterations.outer,
        "inner_iterations": o.iterations.inner,
        "oracle_evals": o.oracle_evals,
        "algorithm": algorithm,
        "certified_violation": num(o.certified_violation),
        "eps_terminal": num(o.eps_terminal),
        "per_level_iterations": o.iterations.per_level,
    });
    serde_json::to_string_pretty(&v).expect("json values serialize")
}

/// Process exit status for an outcome: 0 on success, 2 otherwise.
pub fn exit_code(o: &SolveOutcome) -> i32 {
    match o.status {
        OutcomeStatus::DeltaApproximate | OutcomeStatus::Terminated => 0,
        OutcomeStatus::InfeasibleSubproblem | OutcomeStatus::BudgetExceeded => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INSTANCE_A: &str = r#"{
        "x_box": {"lower": [-2], "upper": [2]},
        "y_box": {"lower": [0], "upper": [1]},
        "objective": {"q": [[2]], "c": [0]},
        "constraints": [{"x_coeffs": [[{"exps": [0], "coef": 1}]],
                         "offset": [{"exps": [0], "coef": -1}, {"exps": [1], "coef": 1}]}],
        "slater_point": [-2]
    }"#;

    #[test]
    fn parses_instance_a() {
        let p = parse_problem(INSTANCE_A, None).unwrap();
        let a = instances::instance_a();
        for x in [-2.0, -0.3, 1.5] {
            assert_eq!(p.objective().value(&[x]), a.objective().value(&[x]));
            for y in [0.0, 0.5, 1.0] {
                assert_eq!(p.max_constraint(&[x], &[y]), a.max_constraint(&[x], &[y]));
            }
        }
        assert_eq!(p.objective().lipschitz_constant(), Some(4.0));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = INSTANCE_A.replace("\"c\": [0]", "\"c\": [\"zero\"]");
        match parse_problem(&text, None) {
            Err(SipError::Schema { field, .. }) => assert_eq!(field, "objective.c[0]"),
            other => panic!("unexpected {other:?}"),
        }
        let text = INSTANCE_A.replace("\"x_box\"", "\"xbox\"");
        assert!(matches!(
            parse_problem(&text, None),
            Err(SipError::Schema { .. })
        ));
        assert!(matches!(parse_problem("{", None), Err(SipError::Json(_))));
    }

    #[test]
    fn indefinite_objective_is_rejected() {
        let text = INSTANCE_A.replace("[[2]]", "[[-1]]");
        let err = parse_problem(&text, None).unwrap_err();
        assert!(err.to_string().starts_with("objective not convex"), "{err}");
    }

    #[test]
    fn regression_file_builds_instance_r() {
        let text = r#"{"kind": "regression",
            "data": [{"u": [0], "t": 1}, {"u": [1], "t": 0}],
            "degree": 1,
            "u_box": {"lower": [0], "upper": [1]},
            "w_box": {"lower": [-10, -10], "upper": [10, 10]},
            "constraints": [{"weights": [{"alpha": [1], "c": -1}]}]}"#;
        let p = parse_problem(text, None).unwrap();
        assert_eq!(p.x_domain().lower(), &[-10.0, -10.0]);
        let r = regression::instance_r();
        assert_eq!(
            p.objective().value(&[0.2, 0.3]),
            r.objective().value(&[0.2, 0.3])
        );
    }

    #[test]
    fn builtins_and_round_trip() {
        for name in instances::BUILTIN_NAMES {
            let p = load_problem(&format!("builtin:{name}")).unwrap();
            let q = parse_problem(&serialize_problem(&p).unwrap(), None).unwrap();
            assert_eq!(p.slater_point(), q.slater_point());
        }
        assert!(load_problem("builtin:nope").is_err());
    }

    #[test]
    fn rho_parsing() {
        assert_eq!(parse_rho("inf").unwrap(), f64::INFINITY);
        assert_eq!(parse_rho("0.5").unwrap(), 0.5);
        assert!(parse_rho("-1").is_err());
    }
}
