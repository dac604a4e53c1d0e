//! Discretization sizes with and without pruning on the unrestricted run.

use adaptive_sip::bench::{run_bench, BenchConfig};
use adaptive_sip::instances;

fn main() -> adaptive_sip::Result<()> {
    for (name, problem) in [
        ("A", instances::instance_a()),
        ("B", instances::instance_b()),
    ] {
        let report = run_bench(
            &problem,
            &BenchConfig {
                iterations: 30,
                ..BenchConfig::default()
            },
        )?;
        println!("instance {name}");
        print!("{}", report.table());
        println!();
    }
    Ok(())
}
