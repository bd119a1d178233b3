fn main() {
    std::process::exit(mpep_core::cli::main_with_args(std::env::args_os()));
}
