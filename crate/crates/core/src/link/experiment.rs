//! Random-traffic experiment: uniform (input, weight) windows through each
//! ordering strategy onto one link.
//!
//! Randomness: packet `p` draws its 64 bytes from a ChaCha8 generator seeded
//! with the root seed and switched to stream `p`. Bytes 0..32 are the
//! inputs, bytes 32..64 the weights. A given (seed, p) therefore yields the
//! same window for every strategy and regardless of how packets are split
//! across threads.

use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{apply_ordering_with, pack_packet, Link, LaneStats, OrderingStrategy, Pair, WINDOW_PAIRS};
use crate::error::Result;
use crate::psu::SortOrder;

/// Random windows are treated as a 4x8 tile, one row per flit.
const RANDOM_TILE: (usize, usize) = (4, 8);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Table1Config {
    pub packets: u64,
    pub seed: u64,
    pub order: SortOrder,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            packets: 100_000,
            seed: 1,
            order: SortOrder::Ascending,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Row {
    pub strategy: String,
    pub packets: u64,
    pub stats: LaneStats,
    /// Overall reduction against the non-optimized run, in percent.
    pub reduction_pct: f64,
    pub seed: u64,
}

impl Table1Row {
    pub fn input_avg(&self) -> f64 {
        self.stats.input_avg()
    }

    pub fn weight_avg(&self) -> f64 {
        self.stats.weight_avg()
    }

    pub fn overall_avg(&self) -> f64 {
        self.stats.overall_avg()
    }
}

pub fn random_window(seed: u64, packet: u64) -> [Pair; WINDOW_PAIRS] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(packet);
    let mut bytes = [0u8; 2 * WINDOW_PAIRS];
    rng.fill_bytes(&mut bytes);
    std::array::from_fn(|i| Pair::new(bytes[i], bytes[WINDOW_PAIRS + i]))
}

fn simulate(config: &Table1Config, strategy: &OrderingStrategy) -> Result<LaneStats> {
    let mut link = Link::new();
    for p in 0..config.packets {
        let window = random_window(config.seed, p);
        let ordered = apply_ordering_with(&window, Some(RANDOM_TILE), strategy, config.order)?;
        link.send(&pack_packet(&ordered)?);
    }
    Ok(link.stats())
}

fn reduction(baseline: &LaneStats, stats: &LaneStats) -> f64 {
    let base = baseline.overall_avg();
    if base == 0.0 {
        0.0
    } else {
        (base - stats.overall_avg()) / base * 100.0
    }
}

/// Runs one strategy, plus the non-optimized baseline on the same traffic.
pub fn run_table1_experiment(
    config: &Table1Config,
    strategy: &OrderingStrategy,
) -> Result<Table1Row> {
    let mut rows = run_table1(config, &[OrderingStrategy::NonOptimized, strategy.clone()])?;
    Ok(rows.pop().unwrap())
}

/// Runs every strategy on identical seeded traffic, in parallel. Rows come
/// back in the order of `strategies`.
pub fn run_table1(config: &Table1Config, strategies: &[OrderingStrategy]) -> Result<Vec<Table1Row>> {
    let mut jobs: Vec<&OrderingStrategy> = strategies.iter().collect();
    if !strategies.contains(&OrderingStrategy::NonOptimized) {
        jobs.push(&OrderingStrategy::NonOptimized);
    }
    let stats = jobs
        .par_iter()
        .map(|s| simulate(config, s))
        .collect::<Result<Vec<_>>>()?;
    let baseline = jobs
        .iter()
        .position(|s| **s == OrderingStrategy::NonOptimized)
        .map(|i| stats[i])
        .unwrap();
    Ok(strategies
        .iter()
        .zip(&stats)
        .map(|(s, st)| Table1Row {
            strategy: s.name().to_string(),
            packets: config.packets,
            stats: *st,
            reduction_pct: reduction(&baseline, st),
            seed: config.seed,
        })
        .collect())
}

pub fn write_table1_csv<W: Write>(rows: &[Table1Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "strategy",
        "packets",
        "input_bt_avg",
        "weight_bt_avg",
        "overall_avg",
        "reduction_pct",
        "seed",
    ])?;
    for r in rows {
        w.write_record([
            r.strategy.clone(),
            r.packets.to_string(),
            format!("{:.3}", r.input_avg()),
            format!("{:.3}", r.weight_avg()),
            format!("{:.3}", r.overall_avg()),
            format!("{:.3}", r.reduction_pct),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
