//! One PASS/FAIL line per acceptance criterion.
//!
//! FAIL lines are reported, not hidden; set `SECTORAL_STRICT=1` to turn them
//! into a non-zero exit.

use sectoral::verify::{run_all, DEFAULT_SEED};

fn main() {
    let seed = std::env::var("SECTORAL_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let report = run_all(seed, |c| {
        println!(
            "{} {:02} {} ({:.1}s): {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            c.seconds,
            c.detail
        );
    });
    println!("acceptance: {} passed, {} failed", report.passed, report.failed);
    if !report.all_passed() && std::env::var_os("SECTORAL_STRICT").is_some() {
        std::process::exit(1);
    }
}
