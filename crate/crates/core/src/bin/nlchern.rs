fn main() {
    std::process::exit(nlchern::cli::main_with_args(std::env::args_os()));
}
