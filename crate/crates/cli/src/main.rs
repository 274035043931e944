fn main() {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = fracreach_cli::run(std::env::args(), &mut out, &mut err);
    std::process::exit(code);
}
