use clap::Parser;

fn main() {
    env_logger::init();
    let cli = dominative::cli::Cli::parse();
    std::process::exit(dominative::cli::execute(cli));
}
