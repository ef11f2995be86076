fn main() {
    std::process::exit(divrec::cli::main_with_args(std::env::args_os()));
}
