fn main() {
    std::process::exit(roadsense::cli::run(std::env::args_os()));
}
