use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(adjmech_cli::run(std::env::args_os()))
}
