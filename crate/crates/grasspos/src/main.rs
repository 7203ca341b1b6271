fn main() {
    std::process::exit(grasspos::cli::run(std::env::args_os()));
}
