fn main() {
    std::process::exit(hcst::cli::run(std::env::args_os()));
}
