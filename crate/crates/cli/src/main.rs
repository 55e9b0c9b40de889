fn main() {
    std::process::exit(fjm_cli::run(std::env::args_os()));
}
