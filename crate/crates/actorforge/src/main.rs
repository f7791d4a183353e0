use clap::Parser;

fn main() {
    let cli = actorforge::cli::Cli::parse();
    std::process::exit(i32::from(actorforge::cli::run(&cli)));
}
