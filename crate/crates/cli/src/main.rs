fn main() {
    std::process::exit(ugcbench_cli::run(std::env::args_os()));
}
