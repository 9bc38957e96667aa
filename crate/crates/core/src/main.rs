fn main() {
    std::process::exit(slocc_pit::cli::run());
}
