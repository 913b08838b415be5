fn main() {
    std::process::exit(commentum::cli::main_with_args(std::env::args_os()));
}
