use clap::Parser;
use cvcrc::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli, &mut std::io::stdout().lock()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
