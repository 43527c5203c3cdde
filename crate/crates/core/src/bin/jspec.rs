fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = jspec::cli::main_with(&args, &mut std::io::stdout().lock());
    std::process::exit(code);
}
