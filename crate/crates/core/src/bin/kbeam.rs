fn main() {
    std::process::exit(kirchhoff_beam::cli::main_with_args(std::env::args_os()));
}
