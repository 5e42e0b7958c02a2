fn main() {
    std::process::exit(rcar_tail::cli::run_cli(std::env::args_os()));
}
