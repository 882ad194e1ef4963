use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use popsort::cli::{cmd_cost, cmd_lenet, cmd_sortdemo, cmd_table1, ExperimentConfig, ImagePattern};
use popsort::psu::SortOrder;

#[derive(Parser)]
#[command(version, about = "Popcount sorting unit link bit-transition experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Packets of random traffic (table1).
    #[arg(long, global = true, default_value_t = 100_000)]
    packets: u64,
    /// Root seed for all randomness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Bucket count of the approximate unit, 1..=9.
    #[arg(long, global = true, default_value_t = 4)]
    buckets: usize,
    /// Kernel side of the conv layer (5 or 7).
    #[arg(long, global = true, default_value_t = 5, value_parser = parse_kernel)]
    kernel: usize,
    /// Report only this strategy.
    #[arg(long, global = true, value_parser = ["none", "colmajor", "acc", "app"])]
    strategy: Option<String>,
    /// Sort highest popcount first.
    #[arg(long, global = true)]
    descending: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// IDX or BLNK image for lenet.
    #[arg(long, global = true)]
    image: Option<PathBuf>,
    /// Synthetic image for lenet when --image is absent.
    #[arg(long, global = true, value_enum, default_value_t = Pattern::Random)]
    pattern: Pattern,
    /// Dump the pooled layer output of lenet as CSV.
    #[arg(long, global = true)]
    dump: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Random traffic through all four ordering strategies.
    Table1,
    /// LeNet-5 C1 + pooling workload through all four strategies.
    Lenet,
    /// Relative area of accurate, approximate and bitonic units.
    Cost,
    /// Stage-by-stage sort traces of the four test patterns.
    Sortdemo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pattern {
    Random,
    Gradient,
    Checkerboard,
}

fn parse_kernel(s: &str) -> Result<usize, String> {
    match s {
        "5" => Ok(5),
        "7" => Ok(7),
        _ => Err("kernel must be 5 or 7".into()),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = ExperimentConfig {
        packets: args.packets,
        seed: args.seed,
        buckets: args.buckets,
        kernel: args.kernel,
        strategy: args.strategy,
        order: if args.descending {
            SortOrder::Descending
        } else {
            SortOrder::Ascending
        },
        image: args.image,
        pattern: match args.pattern {
            Pattern::Random => ImagePattern::Random,
            Pattern::Gradient => ImagePattern::Gradient,
            Pattern::Checkerboard => ImagePattern::Checkerboard,
        },
        dump: args.dump,
    };

    let mut ok = true;
    let result = match args.command {
        Command::Table1 => cmd_table1(&cfg),
        Command::Lenet => cmd_lenet(&cfg).map(|o| {
            ok = o.all_correct;
            o.csv
        }),
        Command::Cost => cmd_cost(&cfg),
        Command::Sortdemo => cmd_sortdemo(&cfg),
    };
    let text = match result {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: streamed output differs from the golden model");
        ExitCode::FAILURE
    }
}
