use clap::Parser;

fn main() {
    let cli = cchart::cli::Cli::parse();
    std::process::exit(cchart::cli::run(cli));
}
