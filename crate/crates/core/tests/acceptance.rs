//! The full acceptance battery: one line per criterion, exact verdicts.

use std::process::ExitCode;
use std::time::Instant;

use meshrep::checks::{CheckConfig, Suite};

fn main() -> ExitCode {
    let cfg = CheckConfig { seed: 20261014, ..CheckConfig::default() };
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, suite) in Suite::ALL.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| o == suite.name()) {
            continue;
        }
        let t = Instant::now();
        let r = suite.run(&cfg);
        let verdict = if r.passed() { "pass" } else { "FAIL" };
        println!("criterion {:>2} [{}] {verdict}: {}/{} cases in {:.1?}", i + 1, suite, r.cases - r.failures, r.cases, t.elapsed());
        for s in &r.summary {
            println!("    {s}");
        }
        if let Some(c) = &r.counterexample {
            println!("    first counterexample: {c}");
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
