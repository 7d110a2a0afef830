use clap::Parser;

use netbgk_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Err(e) => {
            eprintln!("netbgk: {e}");
            std::process::exit(1);
        }
    }
}
