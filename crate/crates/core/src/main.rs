use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use superspencer::cli::{run, write_json, JobSpec};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let spec = JobSpec::parse();
    if let Some(n) = spec.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("thread pool: {e}");
        }
    }
    let outcome = run(&spec, args.into_iter().skip(1).collect());
    for e in &outcome.report.errors {
        eprintln!("error: {e}");
    }
    match &spec.output {
        Some(path) => {
            if let Err(e) = write_json(path, &outcome.report) {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        }
        None => {
            let text = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            // A closed pipe downstream is not an error of the job.
            let _ = writeln!(std::io::stdout(), "{text}");
        }
    }
    ExitCode::from(outcome.exit_code)
}
