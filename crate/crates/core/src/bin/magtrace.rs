fn main() {
    std::process::exit(magtrace::cli::run(std::env::args_os()));
}
