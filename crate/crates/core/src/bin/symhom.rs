fn main() {
    std::process::exit(symhom::cli::run(std::env::args_os()));
}
