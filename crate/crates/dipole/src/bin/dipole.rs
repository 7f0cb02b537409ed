fn main() {
    std::process::exit(dipole::cli::run(std::env::args_os()));
}
