fn main() {
    std::process::exit(wavefront_lab::cli::run_cli(std::env::args_os()));
}
