fn main() {
    std::process::exit(chowla_lab::run(std::env::args_os()));
}
