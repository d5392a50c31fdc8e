fn main() {
    std::process::exit(compop::cli::main_entry());
}
