fn main() {
    std::process::exit(shadowqae::cli::main_with_args(std::env::args_os()));
}
