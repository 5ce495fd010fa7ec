fn main() {
    std::process::exit(bellext::cli::run(std::env::args_os()));
}
