fn main() {
    let code = mengerlab::cli::run(std::env::args_os());
    std::process::exit(code);
}
