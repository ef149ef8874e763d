fn main() -> std::process::ExitCode {
    thermex::cli::main_with_args(std::env::args_os())
}
