fn main() {
    std::process::exit(dstrips_cli::main_with_args(std::env::args_os()));
}
