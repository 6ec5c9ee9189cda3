fn main() -> std::process::ExitCode {
    entrobound::cli::run_from_args(std::env::args_os())
}
