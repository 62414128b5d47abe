fn main() {
    std::process::exit(phaserk_cli::run_cli(std::env::args_os()));
}
