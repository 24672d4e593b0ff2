fn main() {
    std::process::exit(womops::cli::main_with_args(std::env::args_os()));
}
