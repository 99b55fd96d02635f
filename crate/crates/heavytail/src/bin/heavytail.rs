fn main() {
    std::process::exit(heavytail::cli::main());
}
