use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(liecover::cli::main_with(std::env::args_os()))
}
