//! One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

use gcross_core::acceptance::run_all;

fn main() {
    let results = run_all(false);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} of {} criteria passed", results.len(), results.len());
}
