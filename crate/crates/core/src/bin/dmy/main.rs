#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::Cli;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("DMY_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("DMY_THREADS must be a non-negative integer, got '{raw}'"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Usage line of the subcommand named in `argv`, or of the whole tool.
fn usage_for(argv: &[std::ffi::OsString]) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    let sub = argv.get(1).map(|s| s.to_string_lossy().into_owned());
    let usage = match sub.as_deref().and_then(|s| cmd.find_subcommand_mut(s)) {
        Some(sub) => sub.render_usage(),
        None => cmd.render_usage(),
    };
    usage.to_string()
}

fn main() -> ExitCode {
    if let Err(msg) = init_threads() {
        eprintln!("dmy: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    let argv = match config::merge_config(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(msg) => {
            eprintln!("dmy: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::from(EXIT_PASS);
            }
            if !e.render().to_string().contains("Usage:") {
                eprintln!("\n{}", usage_for(&argv));
            }
            return ExitCode::from(EXIT_USAGE);
        }
    };
    ExitCode::from(commands::run(cli.command))
}
