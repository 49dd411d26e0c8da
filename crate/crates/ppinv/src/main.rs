fn main() {
    let code = ppinv::cli::main();
    std::process::exit(code);
}
