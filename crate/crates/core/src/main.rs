fn main() {
    std::process::exit(zeroscan::cli::run());
}
