fn main() {
    std::process::exit(lmhs_heights::cli::main_with_args(std::env::args_os()));
}
