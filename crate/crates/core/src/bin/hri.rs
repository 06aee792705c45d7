fn main() {
    env_logger::init();
    std::process::exit(hri_sim::cli::run_cli(std::env::args_os()));
}
