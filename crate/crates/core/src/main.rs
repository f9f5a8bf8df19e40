fn main() {
    std::process::exit(agmon::cli::run());
}
