//! Random traffic through the four ordering strategies.
//!
//! cargo run --release --example random_link_traffic -- [packets] [seed]

use std::io;

use popsort::link::{run_table1, write_table1_csv, OrderingStrategy, Table1Config};
use popsort::psu::{BucketSpec, SortOrder};

fn main() -> popsort::Result<()> {
    let mut args = std::env::args().skip(1);
    let packets = args.next().and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);

    for order in [SortOrder::Ascending, SortOrder::Descending] {
        let config = Table1Config { packets, seed, order };
        let rows = run_table1(&config, &OrderingStrategy::all(BucketSpec::default()))?;
        println!("# {order:?}");
        write_table1_csv(&rows, io::stdout())?;
    }
    Ok(())
}
