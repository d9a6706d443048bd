//! Command-line driver for fractal CSS codes.

mod commands;
mod geometry;
mod table;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geometry::{GeomArgs, InputArgs};

#[derive(Parser, Debug)]
#[command(
    name = "fractalcss",
    version,
    about = "Fractal CSS codes: geometry, homology, distances and gate checks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file, or `-` for standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Accepted for reproducible pipelines; every computation is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for scans (0 picks the core count).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a fractal cell complex.
    Gen(GeomArgs),
    /// Build the CSS code of a complex.
    Code(InputArgs),
    /// Qubit and logical counts.
    Params(InputArgs),
    /// Z and X distances.
    Distance(commands::DistanceArgs),
    /// Betti numbers, absolute or relative to rough or smooth cells.
    Homology(commands::HomologyArgs),
    /// Transversal CZ, CCZ or S conditions.
    GateCheck(commands::GateArgs),
    /// Merge two copies of a code along their facing rough faces.
    Merge(GeomArgs),
    /// Parameters and distances over a range of levels, as CSV.
    Scan(commands::ScanArgs),
    /// Dimension and distance exponents of the FC(p,q) families, as CSV.
    Table1(table::TableArgs),
    /// Write complex, code, check matrices and parameters to a directory.
    Export(GeomArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> anyhow::Result<i32> {
        if cli.common.threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(cli.common.threads)
                .build_global()?;
        }
        let c = &cli.common;
        match &cli.command {
            Command::Gen(g) => commands::gen(g, c),
            Command::Code(i) => commands::code(i, c),
            Command::Params(i) => commands::params(i, c),
            Command::Distance(d) => commands::distance(d, c),
            Command::Homology(h) => commands::homology(h, c),
            Command::GateCheck(g) => commands::gate_check(g, c),
            Command::Merge(g) => commands::merge(g, c),
            Command::Scan(s) => commands::scan(s, c),
            Command::Table1(t) => table::table1(t, c),
            Command::Export(g) => commands::export(g, c),
        }
    };
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use fractalcss::Error;
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::Budget { .. } => 3,
                Error::Inconsistent(_) => 1,
                _ => 2,
            };
        }
    }
    if e.chain()
        .any(|c| c.downcast_ref::<std::io::Error>().is_some())
    {
        1
    } else {
        2
    }
}
