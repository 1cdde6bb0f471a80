fn main() {
    std::process::exit(formint::cli::main_with_args(std::env::args()));
}
