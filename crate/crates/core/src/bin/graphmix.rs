fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(graphmix::cli::run_command(&args));
}
