//! Library side of the `nsmop` command-line tool. Every subcommand writes
//! deterministic CSV/JSON artifacts; exit codes are 0 on success, 1 when the
//! solver fails or does not reach a critical point, 2 on usage errors.

pub mod args;
pub mod bench;
pub mod error;
pub mod output;
pub mod pareto;
pub mod solve;
pub mod validate;

use std::fs;

use args::{CatalogArgs, Cli, Command};
use error::{io_err, CliResult};

pub fn cmd_catalog(args: &CatalogArgs) -> CliResult<u8> {
    let mut text = serde_json::to_string_pretty(&nsmop::problems::catalog_listing())?;
    text.push('\n');
    match &args.out {
        Some(path) => fs::write(path, text).map_err(io_err(path))?,
        None => print!("{text}"),
    }
    Ok(0)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = match &cli.command {
        Command::Solve(a) => solve::cmd_solve(a),
        Command::Bench(a) => bench::cmd_bench(a),
        Command::Pareto(a) => pareto::cmd_pareto(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::Validate(a) => validate::cmd_validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nsmop: {e}");
            e.exit_code()
        }
    }
}
