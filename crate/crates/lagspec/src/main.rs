fn main() {
    std::process::exit(lagspec::cli::main_with_args(std::env::args_os()));
}
