fn main() {
    std::process::exit(numsparse_cli::run(std::env::args_os()));
}
