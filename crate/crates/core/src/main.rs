fn main() {
    std::process::exit(pacbayes::cli::run(std::env::args_os()));
}
