use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cancellable::cli::run(std::env::args_os()))
}
