fn main() {
    let code = whylog::cli::run(std::env::args_os());
    std::process::exit(code);
}
