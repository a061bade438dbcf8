fn main() {
    std::process::exit(fuchsian::cli::main_with_args(std::env::args().collect()));
}
