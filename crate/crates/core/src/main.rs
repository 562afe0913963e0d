fn main() {
    std::process::exit(microreg::cli::main());
}
