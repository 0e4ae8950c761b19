fn main() {
    std::process::exit(distsec::cli::run(std::env::args_os()));
}
