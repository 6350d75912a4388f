fn main() {
    std::process::exit(poincare21::cli::run(std::env::args_os()));
}
