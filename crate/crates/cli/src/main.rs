fn main() {
    std::process::exit(genner_cli::run(std::env::args_os()));
}
