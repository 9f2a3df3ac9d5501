use std::process::ExitCode;

use toa_lab::par::Execution;
use toa_lab::verify::run_criterion;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for n in 1..=9 {
        let r = run_criterion(n, Execution::default());
        println!("{r}");
        if !r.passed {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
