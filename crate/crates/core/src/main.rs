fn main() {
    std::process::exit(radial_ns::cli::main_with_args(std::env::args_os()));
}
