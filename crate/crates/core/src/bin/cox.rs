fn main() {
    std::process::exit(cox_core::cli::run(std::env::args_os()));
}
