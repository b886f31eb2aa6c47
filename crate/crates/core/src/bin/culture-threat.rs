fn main() {
    std::process::exit(culture_threat::cli::run(std::env::args_os()));
}
