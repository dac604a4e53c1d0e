mod common;

use std::path::Path;
use std::process::{Command, Output};

use adaptive_sip::io::{load_problem, parse_problem, serialize_problem};
use adaptive_sip::{instances, SipProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SIP: &str = r#"{"kind": "sip",
 "x_box": {"lower": [-2], "upper": [2]},
 "y_box": {"lower": [0], "upper": [1]},
 "objective": {"q": [[2]], "c": [0], "d": 0},
 "constraints": [{"x_coeffs": [[{"exps": [0], "coef": 1}]],
                  "offset": [{"exps": [0], "coef": -1}, {"exps": [1], "coef": 1}]}],
 "slater_point": [-2]}"#;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptive-sip"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_succeeds_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write(dir.path(), "a.json", SIP);
    let outcome = dir.path().join("outcome.json");
    let o = bin(&[
        "solve",
        "--problem",
        &problem,
        "--delta",
        "1e-2",
        "--outcome-out",
        outcome.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let printed: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&outcome).unwrap()).unwrap();
    assert_eq!(printed, saved);
    assert_eq!(saved["status"], "DeltaApproximate");
    assert!(saved["f"].as_f64().unwrap() <= 1e-2);
    let keys: Vec<&str> = saved
        .as_object()
        .unwrap()
        .keys()
        .map(String::as_str)
        .collect();
    for k in [
        "status",
        "x",
        "f",
        "feasibility_margin",
        "outer_iterations",
        "inner_iterations",
        "oracle_evals",
    ] {
        assert!(keys.contains(&k), "missing {k} in {keys:?}");
    }
}

#[test]
fn exhausted_budget_exits_two() {
    let o = bin(&[
        "solve",
        "--problem",
        "builtin:instance_B",
        "--delta",
        "1e-9",
        "--max-iters",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "BudgetExceeded");
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"x_box\": ");
    let o = bin(&["solve", "--problem", &broken]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));

    let wrong = write(dir.path(), "wrong.json", &SIP.replace("\"q\"", "\"qq\""));
    let o = bin(&["check", "--problem", &wrong]);
    assert_eq!(o.status.code(), Some(1));

    let o = bin(&["solve", "--problem", "builtin:instance_A", "--rho=-3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = bin(&["solve", "--problem", "builtin:instance_A", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    let o = bin(&["solve", "--problem", "no/such/file.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn traces_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for algorithm in ["sequential", "simultaneous", "core"] {
        let runs: Vec<Vec<u8>> = (0..2)
            .map(|i| {
                let t = dir.path().join(format!("{algorithm}{i}.csv"));
                let o = bin(&[
                    "solve",
                    "--problem",
                    "builtin:instance_B",
                    "--algorithm",
                    algorithm,
                    "--trace-out",
                    t.to_str().unwrap(),
                ]);
                assert_eq!(o.status.code(), Some(0), "{algorithm}");
                std::fs::read(&t).unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1], "{algorithm}");
        let text = String::from_utf8(runs[0].clone()).unwrap();
        let header = text.lines().next().unwrap();
        assert!(
            header.starts_with("k,eps,card_Y,f_x,max_violation,branch,lp_iters,oracle_evals"),
            "{header}"
        );
        assert!(text.lines().count() > 1);
    }
}

#[test]
fn check_and_bench_report() {
    let o = bin(&["check", "--problem", "builtin:instance_B"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("x in R^2, y in R^1, 1 constraint family"), "{s}");
    assert!(s.contains("slater point"));

    let o = bin(&["bench", "--iterations", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(
        s.contains("|Y| rho=0") && s.contains("grid baseline: 1001 points"),
        "{s}"
    );
    assert_eq!(
        s.lines()
            .filter(|l| l.trim_start().starts_with(char::is_numeric))
            .count(),
        10
    );
}

#[test]
fn regression_files_with_csv_data() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "data.csv", "u,t\n0,1\n1,0\n");
    let problem = write(
        dir.path(),
        "r.json",
        r#"{"kind": "regression", "data_csv": "data.csv", "degree": 1,
            "u_box": {"lower": [0], "upper": [1]},
            "w_box": {"lower": [-10, -10], "upper": [10, 10]},
            "constraints": [{"weights": [{"alpha": [1], "c": -1}]}]}"#,
    );
    let from_file = load_problem(&problem).unwrap();
    let builtin = instances::builtin("instance_R").unwrap();
    assert_same_values(&from_file, &builtin, 1);
    let o = bin(&["solve", "--problem", &problem, "--delta", "1e-3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!((v["f"].as_f64().unwrap() - 0.5).abs() <= 1e-3);
}

fn assert_same_values(a: &SipProblem, b: &SipProblem, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng, d: &adaptive_sip::BoxDomain| -> Vec<f64> {
        d.lower()
            .iter()
            .zip(d.upper())
            .map(|(l, u)| rng.gen_range(*l..=*u))
            .collect()
    };
    assert_eq!(a.constraints().len(), b.constraints().len());
    for _ in 0..100 {
        let x = sample(&mut rng, a.x_domain());
        let y = sample(&mut rng, a.y_domain());
        assert_eq!(
            a.objective().value(&x).to_bits(),
            b.objective().value(&x).to_bits()
        );
        for (ga, gb) in a.constraints().iter().zip(b.constraints()) {
            assert_eq!(ga.value(&x, &y).to_bits(), gb.value(&x, &y).to_bits());
        }
    }
}

#[test]
fn serialized_problems_load_back_identically() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut problems: Vec<SipProblem> = instances::BUILTIN_NAMES
        .iter()
        .map(|n| instances::builtin(n).unwrap())
        .collect();
    for _ in 0..5 {
        let (p, q) = (rng.gen_range(1..=3), rng.gen_range(1..=2));
        problems.push(common::random_instance(&mut rng, p, q, 2));
    }
    for (i, p) in problems.iter().enumerate() {
        let text = serialize_problem(p).unwrap();
        let back = parse_problem(&text, None).unwrap();
        assert_same_values(p, &back, i as u64);
        assert_eq!(p.slater_point(), back.slater_point());
        assert_eq!(serialize_problem(&back).unwrap(), text);
    }
}

#[test]
fn bundled_problem_files() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");
    let b = load_problem(&format!("{dir}/instance_b.json")).unwrap();
    assert_same_values(&b, &instances::instance_b(), 5);
    for (file, f_star) in [("instance_b.json", 2.0), ("square_halfplanes.json", 4.5)] {
        let o = bin(&[
            "solve",
            "--problem",
            &format!("{dir}/{file}"),
            "--delta",
            "1e-3",
        ]);
        assert_eq!(o.status.code(), Some(0), "{file}");
        let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        let f = v["f"].as_f64().unwrap();
        assert!(f >= f_star - 1e-9 && f <= f_star + 1e-3, "{file}: f = {f}");
    }
    let o = bin(&["check", "--problem", &format!("{dir}/monotone_fit.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x in R^4, y in R^1"));
}
