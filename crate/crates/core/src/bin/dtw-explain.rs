fn main() {
    std::process::exit(dtw_explain::cli::run(std::env::args_os()));
}
