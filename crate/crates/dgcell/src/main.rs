use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dgcell::cells::{OrderKind, Side, DEFAULT_DEPTH};
use dgcell::cli::{run, validation_failure, Command, EXIT_INPUT};
use dgcell::input::{parse_file, InputError};

#[derive(Parser)]
#[command(name = "dgcell", version, about = "Cells and cell 2-representations of bimodule 2-categories over finite-dimensional dg algebras")]
struct Args {
    /// Algebra input file (TOML).
    input: PathBuf,
    #[command(subcommand)]
    command: Cmd,
    /// Seed for randomised subroutines.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Weak,
    Strong,
    Tri,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    #[value(name = "L", alias = "l")]
    L,
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "J", alias = "j")]
    J,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the algebra axioms.
    Validate,
    /// Order relations and cells on generator 1-morphisms.
    Cells {
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Skip the bounded strong and triangulated searches.
        #[arg(long)]
        weak_only: bool,
    },
    /// Maximal dg ideals of a cell's 2-representation.
    Maxspec {
        #[arg(long)]
        cell: String,
    },
    /// Cell 2-representation descriptor.
    Cellrep {
        #[arg(long)]
        cell: String,
        #[arg(long, default_value_t = 0)]
        ideal: usize,
    },
    /// Compare two generators.
    Order {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Run the full classification with all cross-checks.
    #[command(visible_alias = "verify-paper")]
    Verify {
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Validate => Command::Validate,
        Cmd::Cells { depth, weak_only } => Command::Cells { depth, weak_only },
        Cmd::Maxspec { cell } => Command::MaxSpec { cell },
        Cmd::Cellrep { cell, ideal } => Command::CellRep { cell, ideal },
        Cmd::Order { kind, side, lhs, rhs, depth } => Command::Order {
            kind: match kind {
                KindArg::Weak => OrderKind::Weak,
                KindArg::Strong => OrderKind::Strong,
                KindArg::Tri => OrderKind::Tri,
            },
            side: match side {
                SideArg::L => Side::L,
                SideArg::R => Side::R,
                SideArg::J => Side::J,
            },
            lhs,
            rhs,
            depth,
        },
        Cmd::Verify { depth } => Command::Verify { depth },
    };
    let emit = |r: &dgcell::cli::Report| match args.format {
        Format::Json => println!("{}", r.to_json()),
        Format::Text => print!("{}", r.to_text()),
    };
    let (input, bytes) = match parse_file(&args.input) {
        Ok(x) => x,
        Err(e) => {
            if matches!(command, Command::Validate) {
                if let InputError::Invalid(_) = e {
                    let bytes = std::fs::read(&args.input).unwrap_or_default();
                    emit(&validation_failure(&bytes, &e));
                    return ExitCode::from(EXIT_INPUT as u8);
                }
            }
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    match run(&input, &bytes, &command, args.seed) {
        Ok(report) => {
            emit(&report);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
