fn main() {
    std::process::exit(okvalid::run(std::env::args_os()));
}
