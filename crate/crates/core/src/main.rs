use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::Context;
use tempered_geometry::cli;

fn main() -> anyhow::Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = cli::run(std::env::args_os(), &mut out, &mut io::stderr().lock());
    out.flush().context("flushing standard output")?;
    Ok(ExitCode::from(code as u8))
}
