fn main() {
    std::process::exit(magfreq::cli::main_entry());
}
