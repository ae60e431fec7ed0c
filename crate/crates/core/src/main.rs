fn main() {
    std::process::exit(circle_walk::cli::run(std::env::args_os()));
}
