fn main() {
    std::process::exit(asian_ld::cli::run(std::env::args_os()));
}
