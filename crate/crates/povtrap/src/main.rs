fn main() {
    std::process::exit(povtrap::cli::run(std::env::args_os()));
}
