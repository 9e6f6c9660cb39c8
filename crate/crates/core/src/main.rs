fn main() {
    std::process::exit(resistnet::cli::main_with_args(std::env::args_os()));
}
