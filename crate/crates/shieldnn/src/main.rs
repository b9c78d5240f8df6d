fn main() {
    let code = shieldnn::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code as i32);
}
