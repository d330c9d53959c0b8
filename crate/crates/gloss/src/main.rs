fn main() {
    std::process::exit(gloss::cli::run(std::env::args_os()));
}
