fn main() {
    std::process::exit(rsc_fixpoint::cli::run(std::env::args_os()));
}
