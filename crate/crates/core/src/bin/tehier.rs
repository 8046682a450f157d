fn main() {
    std::process::exit(tehier::cli::run(std::env::args_os()));
}
