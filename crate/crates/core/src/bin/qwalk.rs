fn main() {
    std::process::exit(qwalk::cli::main());
}
