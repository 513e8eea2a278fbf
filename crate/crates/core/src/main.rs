fn main() {
    std::process::exit(reduction_engine::cli::run(std::env::args_os()));
}
