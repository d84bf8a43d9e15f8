fn main() {
    std::process::exit(trapwalk_cli::main_with(std::env::args_os()));
}
