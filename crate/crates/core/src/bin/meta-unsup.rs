fn main() {
    std::process::exit(meta_unsup::cli::main_with_args(std::env::args_os()));
}
