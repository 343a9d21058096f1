use clap::error::ErrorKind;
use clap::Parser;

use scalewave_cli::commands::{self, Cli, ToleranceBreach};

/// Exit codes: 0 success (including --help/--version), 1 configuration or
/// I/O errors, 2 a numeric tolerance was exceeded.
fn main() {
    env_logger::init();
    let code = match Cli::try_parse() {
        Ok(cli) => match commands::run(cli) {
            Ok(()) => 0,
            Err(err) => {
                eprintln!("error: {err:#}");
                if err.downcast_ref::<ToleranceBreach>().is_some() {
                    2
                } else {
                    1
                }
            }
        },
        Err(err) => match err.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{err}");
                0
            }
            _ => {
                eprint!("{err}");
                1
            }
        },
    };
    std::process::exit(code);
}
