use std::process::ExitCode;

fn main() -> ExitCode {
    argnn::cli::main_with_args(std::env::args_os())
}
