fn main() {
    std::process::exit(qdot::cli::run(std::env::args_os()));
}
