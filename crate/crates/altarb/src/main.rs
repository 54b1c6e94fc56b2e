use std::process::ExitCode;

fn main() -> ExitCode {
    altarb::cli::main_with_args(std::env::args_os())
}
