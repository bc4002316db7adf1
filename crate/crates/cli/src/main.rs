fn main() {
    std::process::exit(lmstab_cli::main_with_args(std::env::args_os()));
}
