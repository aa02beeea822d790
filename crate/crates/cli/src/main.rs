fn main() {
    std::process::exit(twostack_cli::run(std::env::args_os()));
}
