use bergman_cli::{run, Cli};
use clap::Parser;

fn main() {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if !outcome.output.is_empty() {
        match &cli.opts.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, &outcome.output) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    std::process::exit(bergman_cli::EXIT_FAILURE);
                }
            }
            None => print!("{}", outcome.output),
        }
    }
    for line in &outcome.diagnostics {
        eprintln!("error: {line}");
    }
    std::process::exit(outcome.exit);
}
