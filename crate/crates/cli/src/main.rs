use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use trisol::report::{
    build_report, build_tower_report, render_text, scan, table1, table2, ReportOptions,
    SCAN_COLUMNS,
};
use trisol::tower::ChainExponents;
use trisol::TriangleParams;

/// Smooth finite soluble quotients of triangle groups.
#[derive(Parser, Debug)]
#[command(name = "trisol", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Output {
    /// Emit JSON.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (scan only).
    #[arg(long)]
    csv: bool,
    /// Cross-check every computed value against the lattice oracle; any
    /// mismatch exits with status 1.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args, Debug, Clone)]
struct Triple {
    #[arg(value_parser = clap::value_parser!(u64).range(2..))]
    p: u64,
    #[arg(value_parser = clap::value_parser!(u64).range(2..))]
    q: u64,
    #[arg(value_parser = clap::value_parser!(u64).range(2..))]
    r: u64,
    /// Exponents m,m' of the second and third layers of the witness chain.
    #[arg(long, value_delimiter = ',', num_args = 1..=2)]
    chain_exponents: Vec<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full report for one triangle group.
    Report {
        #[command(flatten)]
        triple: Triple,
        #[command(flatten)]
        output: Output,
    },
    /// One row per hyperbolic non-perfect triple p <= q <= r <= MAX.
    Scan {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        max: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Print the case table and the derived-length table.
    Tables,
    /// Witness chain followed by Macbeath steps.
    Tower {
        #[command(flatten)]
        triple: Triple,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// One exponent reused at every step, or one per step.
        #[arg(long, value_delimiter = ',')]
        exponents: Vec<u64>,
        #[command(flatten)]
        output: Output,
    },
}

impl Triple {
    fn params(&self) -> Result<TriangleParams> {
        Ok(TriangleParams::new(self.p, self.q, self.r)?)
    }

    fn options(&self, oracle: bool) -> ReportOptions {
        ReportOptions {
            oracle,
            chain_exponents: ChainExponents {
                first: self.chain_exponents.first().copied(),
                second: self.chain_exponents.get(1).copied(),
            },
        }
    }
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Report { triple, output } => {
            if output.csv {
                bail!("--csv is only supported by scan");
            }
            let doc = build_report(&triple.params()?, &triple.options(output.oracle))?;
            if output.json {
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            } else {
                write!(out, "{}", render_text(&doc))?;
            }
        }
        Command::Scan { max, output } => {
            let rows = scan(max, output.oracle)?;
            if output.json {
                serde_json::to_writer_pretty(&mut *out, &rows)?;
                writeln!(out)?;
            } else {
                let mut writer = csv::Writer::from_writer(&mut *out);
                writer.write_record(SCAN_COLUMNS)?;
                for row in &rows {
                    writer.write_record(row.record())?;
                }
                writer.flush()?;
            }
        }
        Command::Tables => {
            write!(out, "{}\n{}", table1()?, table2()?)?;
        }
        Command::Tower {
            triple,
            depth,
            exponents,
            output,
        } => {
            if output.csv {
                bail!("--csv is only supported by scan");
            }
            let doc = build_tower_report(
                &triple.params()?,
                depth,
                &exponents,
                &triple.options(output.oracle),
            )
            .with_context(|| format!("no tower for ({}, {}, {})", triple.p, triple.q, triple.r))?;
            if output.json {
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)?;
            } else {
                write!(out, "{}", render_text(&doc))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = run(cli, &mut out).and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
