fn main() {
    std::process::exit(sortrack::cli::main_with_args(std::env::args_os()));
}
