fn main() {
    std::process::exit(orthoglide_cli::run(std::env::args_os()));
}
