use clap::Parser;
use mfld_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(w) => println!("{} rows -> {} ({})", w.rows, w.csv.display(), w.meta.display()),
        Err(e) => {
            eprintln!("mfld: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
