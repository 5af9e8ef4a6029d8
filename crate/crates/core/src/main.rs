fn main() {
    std::process::exit(zipstrata::cli::run(std::env::args_os()));
}
