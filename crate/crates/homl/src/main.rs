fn main() {
    std::process::exit(homl::cli::run(std::env::args_os()));
}
