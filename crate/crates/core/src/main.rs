use std::process::ExitCode;

fn main() -> ExitCode {
    isotonic::cli::run()
}
