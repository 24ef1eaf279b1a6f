use std::io::Write;

fn main() {
    let (code, out) = dendro::cli::run(std::env::args_os());
    let _ = if code == 2 {
        writeln!(std::io::stderr(), "{}", out)
    } else {
        writeln!(std::io::stdout(), "{}", out)
    };
    std::process::exit(code);
}
