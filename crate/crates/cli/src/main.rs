use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use eidos_cli::{run, Cli, Format, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    let out = outcome.render(cli.format);
    if cli.format == Format::Text && outcome.status == Status::InputError {
        eprint!("{out}");
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    ExitCode::from(outcome.status.code())
}
