fn main() {
    std::process::exit(porebench::cli::run());
}
