fn main() {
    std::process::exit(sullivan::cli::main_with_args(std::env::args_os()));
}
