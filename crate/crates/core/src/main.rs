fn main() {
    std::process::exit(pseudoherm::cli::main_with_args(std::env::args_os()));
}
