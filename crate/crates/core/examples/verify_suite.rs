//! Runs the full registered suite and prints the text report.
//!
//! cargo run --release --example verify_suite -- [seed]

use std::time::Instant;

use shapeinv::verify::{run_suite, SuiteConfig};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = SuiteConfig { seed, ..SuiteConfig::default() };
    let t = Instant::now();
    let report = run_suite(&cfg);
    print!("{}", report.render_text());
    eprintln!("wall clock {:.1} s", t.elapsed().as_secs_f64());
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
