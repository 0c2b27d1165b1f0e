use clap::Parser;

use liekit_cli::commands::Cli;

fn main() {
    let cli = Cli::parse();
    match cli.run() {
        Ok(outcome) => {
            if cli.pretty {
                println!("{}", outcome.pretty);
            } else {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.report).expect("reports serialize")
                );
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
