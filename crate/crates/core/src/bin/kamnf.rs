fn main() {
    std::process::exit(kamnf::cli::main_with_args(std::env::args_os()));
}
