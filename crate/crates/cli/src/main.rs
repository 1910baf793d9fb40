fn main() {
    std::process::exit(matroid_kappa_cli::main_with_env());
}
