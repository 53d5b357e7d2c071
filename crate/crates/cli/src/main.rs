fn main() {
    std::process::exit(specweight_cli::run(std::env::args_os()));
}
