fn main() {
    std::process::exit(maxinfer::cli::main_with_args(std::env::args_os()));
}
