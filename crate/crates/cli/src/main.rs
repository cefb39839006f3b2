fn main() {
    std::process::exit(monomial_lab_cli::commands::run(std::env::args_os()));
}
