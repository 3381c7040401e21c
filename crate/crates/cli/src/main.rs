use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(flexcurv_cli::run(std::env::args_os()))
}
