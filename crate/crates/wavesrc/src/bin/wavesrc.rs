fn main() {
    std::process::exit(wavesrc::cli::run());
}
