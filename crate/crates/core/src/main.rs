fn main() {
    std::process::exit(onto_overlap::cli::main_with_args(std::env::args_os()));
}
