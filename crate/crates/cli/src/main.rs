use std::process::ExitCode;

use clap::Parser;
use objectivity_cli::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, overrides) = cli.command.split();
    let result = overrides.resolve(kind).and_then(|r| objectivity_cli::run(&r));
    match result {
        Ok(out) => {
            eprintln!("wrote {} ({} rows) and {}", out.csv.display(), out.rows, out.sidecar.display());
            println!("{}", serde_json::to_string_pretty(&out.summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
