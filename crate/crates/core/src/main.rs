fn main() {
    std::process::exit(geodex::cli::run_command(std::env::args_os()));
}
