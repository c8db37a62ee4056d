fn main() {
    std::process::exit(koch_cli::run(std::env::args_os()));
}
