use clap::Parser;

fn main() {
    let cli = afl::cli::Cli::parse();
    let code = afl::cli::run(&cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
