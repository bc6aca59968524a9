fn main() {
    std::process::exit(osc_markets::cli::main(std::env::args_os()));
}
