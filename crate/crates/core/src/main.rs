fn main() {
    std::process::exit(toniq::cli::run(std::env::args_os()));
}
