fn main() {
    std::process::exit(squeeze_lab::cli::run(std::env::args_os()));
}
