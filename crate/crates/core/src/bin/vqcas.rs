fn main() {
    std::process::exit(vqcas::cli::main_with_args(std::env::args_os()));
}
