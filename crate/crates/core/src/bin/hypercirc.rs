use std::process::ExitCode;

fn main() -> ExitCode {
    hypercirc::cli::run(std::env::args_os())
}
