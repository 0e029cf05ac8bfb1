fn main() {
    std::process::exit(pulseframe::cli::main_with_args(std::env::args_os()));
}
