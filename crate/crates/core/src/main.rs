fn main() {
    std::process::exit(owcc::cli::cli_main(std::env::args_os()));
}
