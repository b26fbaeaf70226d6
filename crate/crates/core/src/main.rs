fn main() {
    std::process::exit(khref::cli::run(std::env::args_os()));
}
