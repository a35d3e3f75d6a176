use std::io::{self, IsTerminal};

fn main() {
    let stdout = io::stdout();
    let is_terminal = stdout.is_terminal();
    let code = dirac_gup::cli::run(std::env::args_os(), &mut stdout.lock(), &mut io::stderr(), is_terminal);
    std::process::exit(code);
}
