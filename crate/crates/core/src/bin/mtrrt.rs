fn main() {
    std::process::exit(mtrrt::cli::cli_main(std::env::args_os()));
}
