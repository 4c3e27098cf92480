use std::process::ExitCode;

fn main() -> ExitCode {
    srbfn::cli::run(std::env::args_os())
}
