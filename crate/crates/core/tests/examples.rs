use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: &[(&str, &str)] = &[
    ("sequential_solve", "DeltaApproximate"),
    ("simultaneous_solve", "DeltaApproximate"),
    ("core_loop_trace", "card_Y"),
    ("feasibility_phase", ""),
    ("finite_solver", ""),
    ("lower_level_oracle", ""),
    ("shape_regression", ""),
    ("custom_problem", "DeltaApproximate"),
    ("termination_index", ""),
    ("problem_files", "exit code 0"),
    ("discretization_sizes", "grid baseline"),
];

fn examples_dir() -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>/examples
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

#[test]
fn every_example_runs() {
    let dir = examples_dir();
    let on_disk = std::fs::read_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/examples"))
        .unwrap()
        .count();
    assert_eq!(on_disk, EXAMPLES.len(), "example list out of date");
    for (name, needle) in EXAMPLES {
        let path = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        assert!(path.exists(), "{} not built", path.display());
        let out = Command::new(&path).output().unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(
            out.status.success(),
            "{name} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!stdout.trim().is_empty(), "{name} printed nothing");
        assert!(
            stdout.contains(needle),
            "{name} output lacks {needle:?}:\n{stdout}"
        );
    }
}
