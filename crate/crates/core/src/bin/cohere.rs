fn main() {
    std::process::exit(cohere::cli::run(std::env::args_os()));
}
