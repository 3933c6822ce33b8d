fn main() {
    std::process::exit(prominence::cli::main_with(std::env::args_os()));
}
