fn main() {
    std::process::exit(nematic_cli::run(std::env::args_os()));
}
