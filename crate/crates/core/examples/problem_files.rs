//! Load a problem from JSON, run it from a configuration, and write the
//! outcome and trace files the command line tool produces.

use adaptive_sip::io::{self, Algorithm, RunConfig};

const PROBLEM: &str = r#"{
    "kind": "sip",
    "x_box": {"lower": [-3, -3], "upper": [3, 3]},
    "y_box": {"lower": [0], "upper": [1]},
    "objective": {"q": [[2, 0], [0, 2]], "c": [0, 0]},
    "constraints": [{
        "x_coeffs": [[{"exps": [1], "coef": 1}],
                     [{"exps": [0], "coef": 1}, {"exps": [1], "coef": -1}]],
        "offset": [{"exps": [0], "coef": 1}]
    }],
    "slater_point": [-3, -3]
}"#;

fn main() -> adaptive_sip::Result<()> {
    let problem = io::parse_problem(PROBLEM, None)?;
    let dir = std::env::temp_dir().join("adaptive-sip-example");
    std::fs::create_dir_all(&dir)?;
    let cfg = RunConfig {
        algorithm: Algorithm::Simultaneous,
        delta: 1e-2,
        trace_out: Some(dir.join("trace.csv")),
        outcome_out: Some(dir.join("outcome.json")),
        ..RunConfig::default()
    };
    let outcome = io::run(&cfg, &problem)?;
    println!("{}", io::outcome_json(&outcome, cfg.algorithm));
    println!("exit code {}", io::exit_code(&outcome));
    println!("artifacts in {}", dir.display());
    println!("{}", io::serialize_problem(&problem)?);
    Ok(())
}
