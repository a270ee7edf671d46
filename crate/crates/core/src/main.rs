fn main() {
    std::process::exit(hypspec::cli::main_with_args(std::env::args_os()));
}
