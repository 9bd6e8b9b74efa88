fn main() {
    std::process::exit(unselect::cli::run(std::env::args_os()));
}
