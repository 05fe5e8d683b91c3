fn main() {
    std::process::exit(zfsdma::cli::main_with_args(std::env::args_os()));
}
