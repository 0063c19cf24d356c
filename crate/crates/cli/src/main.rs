use std::process::ExitCode;

fn main() -> ExitCode {
    fsmlab::cli::main(std::env::args_os())
}
