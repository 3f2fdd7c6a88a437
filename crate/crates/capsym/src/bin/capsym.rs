fn main() {
    std::process::exit(capsym::cli::main());
}
