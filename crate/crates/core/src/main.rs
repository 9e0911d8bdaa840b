fn main() {
    std::process::exit(fatpoints::cli::run(std::env::args_os()));
}
