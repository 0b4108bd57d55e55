fn main() {
    std::process::exit(plategen_cli::run(std::env::args_os()));
}
