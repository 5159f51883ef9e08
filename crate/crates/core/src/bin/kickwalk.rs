use clap::Parser;

fn main() {
    let cli = kickwalk::cli::Cli::parse();
    std::process::exit(kickwalk::cli::run(&cli));
}
