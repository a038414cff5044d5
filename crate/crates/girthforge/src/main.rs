fn main() {
    std::process::exit(girthforge::cli::dispatch(std::env::args_os()));
}
