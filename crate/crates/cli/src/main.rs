fn main() {
    std::process::exit(fermikit_cli::run(std::env::args_os()));
}
