use clap::Parser;

fn main() {
    let cli = asp_cli::Cli::parse();
    if let Err(e) = asp_cli::run(cli) {
        eprintln!("{}", e.to_json());
        std::process::exit(e.exit_code());
    }
}
