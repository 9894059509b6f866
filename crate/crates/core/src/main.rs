fn main() {
    std::process::exit(catprob::cli::main_with_args(std::env::args_os()));
}
