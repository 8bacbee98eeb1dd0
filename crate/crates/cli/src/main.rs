use clap::Parser;

fn main() {
    let cli = mvreg::args::Cli::parse();
    if let Err(e) = mvreg::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
