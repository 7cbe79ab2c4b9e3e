use clap::Parser;
use modelswitch::cli;

fn main() {
    let code = cli::run(cli::Cli::parse());
    std::process::exit(code);
}
