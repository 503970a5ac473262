fn main() {
    std::process::exit(multibench::cli::main());
}
