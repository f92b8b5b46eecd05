fn main() {
    std::process::exit(specpol::cli::run(std::env::args_os()));
}
