use clap::Parser;

fn main() {
    let cli = apha_cli::cli::Cli::parse();
    let code = apha_cli::cli::run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
