fn main() {
    std::process::exit(sve::cli::run(std::env::args_os()));
}
