fn main() {
    std::process::exit(rmtk::harness::cli_main(std::env::args_os()));
}
