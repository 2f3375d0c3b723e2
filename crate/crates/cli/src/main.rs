fn main() {
    std::process::exit(macrostate_cli::run(std::env::args_os()));
}
