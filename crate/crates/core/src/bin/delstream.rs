fn main() {
    std::process::exit(delstream::cli::run(std::env::args_os()));
}
