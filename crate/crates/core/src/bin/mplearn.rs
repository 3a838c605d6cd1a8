fn main() {
    std::process::exit(mplearn::cli::dispatch(std::env::args_os()));
}
