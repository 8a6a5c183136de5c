use clap::Parser;
use curlforce_cli::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors exit 1; --help and --version exit 0
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = curlforce_cli::run(cli) {
        eprintln!("curlforce: {e}");
        std::process::exit(e.exit_code());
    }
}
