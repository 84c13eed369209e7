fn main() {
    std::process::exit(pzf_cli::execute(std::env::args_os()));
}
