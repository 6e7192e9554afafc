use clap::Parser;

fn main() {
    let cli = projmon::cli::Cli::parse();
    std::process::exit(projmon::cli::run(cli));
}
