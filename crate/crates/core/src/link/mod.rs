//! Packing (input, weight) pairs onto the 128-bit link and counting the
//! bit transitions they cause.

mod experiment;

pub use experiment::{
    random_window, run_table1, run_table1_experiment, write_table1_csv, Table1Config, Table1Row,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{flit_bt, Flit, Packet, Word, FLITS_PER_PACKET, LANE_WORDS};
use crate::error::{Error, Result};
use crate::psu::{BucketSpec, SortOrder, SortUnit};

/// Pairs carried by one packet.
pub const WINDOW_PAIRS: usize = FLITS_PER_PACKET * LANE_WORDS;

/// An activation and the weight it multiplies; they always travel together.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub input: Word,
    pub weight: Word,
}

impl Pair {
    pub const ZERO: Pair = Pair {
        input: Word::ZERO,
        weight: Word::ZERO,
    };

    pub fn new(input: u8, weight: u8) -> Self {
        Pair {
            input: Word(input),
            weight: Word(weight),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OrderingStrategy {
    NonOptimized,
    ColumnMajor,
    /// Sort by exact popcount (9 bins).
    Acc,
    /// Sort by bucketed popcount.
    App(BucketSpec),
}

impl OrderingStrategy {
    /// The four strategies compared by the experiments, APP using `spec`.
    pub fn all(spec: BucketSpec) -> [OrderingStrategy; 4] {
        [
            OrderingStrategy::NonOptimized,
            OrderingStrategy::ColumnMajor,
            OrderingStrategy::Acc,
            OrderingStrategy::App(spec),
        ]
    }

    /// Bucket spec driving the sort unit, if this strategy sorts.
    pub fn bucket_spec(&self) -> Option<BucketSpec> {
        match self {
            OrderingStrategy::Acc => Some(BucketSpec::exact()),
            OrderingStrategy::App(spec) => Some(spec.clone()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OrderingStrategy::NonOptimized => "none",
            OrderingStrategy::ColumnMajor => "colmajor",
            OrderingStrategy::Acc => "acc",
            OrderingStrategy::App(_) => "app",
        }
    }
}

impl fmt::Display for OrderingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OrderingStrategy {
    type Err = String;

    /// Parses `none`, `colmajor`, `acc` or `app`; `app` uses the default
    /// 4-bucket spec.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(OrderingStrategy::NonOptimized),
            "colmajor" => Ok(OrderingStrategy::ColumnMajor),
            "acc" => Ok(OrderingStrategy::Acc),
            "app" => Ok(OrderingStrategy::App(BucketSpec::default())),
            other => Err(format!(
                "unknown strategy `{other}` (expected none, colmajor, acc or app)"
            )),
        }
    }
}

/// An ordered stream of pairs, optionally tagged with the row-major 2-D
/// tile it was read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairStream {
    pairs: Vec<Pair>,
    tile_shape: Option<(usize, usize)>,
}

impl PairStream {
    pub fn new(pairs: Vec<Pair>, tile_shape: Option<(usize, usize)>) -> Result<Self> {
        check_shape(pairs.len(), tile_shape)?;
        Ok(PairStream { pairs, tile_shape })
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn tile_shape(&self) -> Option<(usize, usize)> {
        self.tile_shape
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn check_shape(len: usize, tile_shape: Option<(usize, usize)>) -> Result<()> {
    match tile_shape {
        Some((rows, cols)) if rows * cols != len => Err(Error::TileShape { rows, cols, len }),
        _ => Ok(()),
    }
}

fn column_major(pairs: &[Pair], tile_shape: Option<(usize, usize)>) -> Vec<Pair> {
    match tile_shape {
        Some((rows, cols)) => (0..cols)
            .flat_map(|c| (0..rows).map(move |r| r * cols + c))
            .map(|i| pairs[i])
            .collect(),
        None => pairs.to_vec(),
    }
}

fn popcount_order(pairs: &[Pair], spec: BucketSpec, order: SortOrder) -> Result<Vec<Pair>> {
    let inputs: Vec<Word> = pairs.iter().map(|p| p.input).collect();
    let trace = SortUnit { spec, order }.run(&inputs)?;
    Ok(trace.output.apply(pairs))
}

/// Reorders one packet's worth of pairs. Sorting strategies permute whole
/// pairs by the sort unit's output over the input words.
pub fn apply_ordering(
    window: &[Pair],
    tile_shape: Option<(usize, usize)>,
    strategy: &OrderingStrategy,
) -> Result<Vec<Pair>> {
    apply_ordering_with(window, tile_shape, strategy, SortOrder::Ascending)
}

pub fn apply_ordering_with(
    window: &[Pair],
    tile_shape: Option<(usize, usize)>,
    strategy: &OrderingStrategy,
    order: SortOrder,
) -> Result<Vec<Pair>> {
    if window.len() != WINDOW_PAIRS {
        return Err(Error::WindowSize(window.len()));
    }
    check_shape(window.len(), tile_shape)?;
    match strategy {
        OrderingStrategy::NonOptimized => Ok(window.to_vec()),
        OrderingStrategy::ColumnMajor => Ok(column_major(window, tile_shape)),
        sorting => popcount_order(window, sorting.bucket_spec().unwrap(), order),
    }
}

/// Orders a stream of arbitrary length for transmission and pads it with
/// zero pairs to a whole number of packets.
///
/// Column-major re-reads the whole tile. Popcount strategies sort each
/// 32-pair chunk of the stream separately; padding is appended afterwards
/// so it never enters the sort.
pub fn order_stream(
    stream: &PairStream,
    strategy: &OrderingStrategy,
    order: SortOrder,
) -> Result<Vec<Pair>> {
    let mut out = match strategy {
        OrderingStrategy::NonOptimized => stream.pairs.clone(),
        OrderingStrategy::ColumnMajor => column_major(&stream.pairs, stream.tile_shape),
        sorting => {
            let spec = sorting.bucket_spec().unwrap();
            let mut out = Vec::with_capacity(stream.len());
            for chunk in stream.pairs.chunks(WINDOW_PAIRS) {
                out.extend(popcount_order(chunk, spec.clone(), order)?);
            }
            out
        }
    };
    out.resize(out.len().div_ceil(WINDOW_PAIRS) * WINDOW_PAIRS, Pair::ZERO);
    Ok(out)
}

/// Pairs `8f..8f+7` fill flit `f`: inputs into the input lane, weights into
/// the weight lane, same positions.
pub fn pack_packet(window: &[Pair]) -> Result<Packet> {
    if window.len() != WINDOW_PAIRS {
        return Err(Error::WindowSize(window.len()));
    }
    let flits = std::array::from_fn(|f| {
        let row = &window[f * LANE_WORDS..(f + 1) * LANE_WORDS];
        Flit {
            input_lane: std::array::from_fn(|i| row[i].input),
            weight_lane: std::array::from_fn(|i| row[i].weight),
        }
    });
    Ok(Packet { flits })
}

pub fn unpack_packet(packet: &Packet) -> Vec<Pair> {
    packet
        .flits
        .iter()
        .flat_map(|f| {
            f.input_lane
                .iter()
                .zip(&f.weight_lane)
                .map(|(&input, &weight)| Pair { input, weight })
        })
        .collect()
}

/// Splits a stream whose length is a multiple of 32 into packets.
pub fn packetize(pairs: &[Pair]) -> Result<Vec<Packet>> {
    if !pairs.len().is_multiple_of(WINDOW_PAIRS) {
        return Err(Error::WindowSize(pairs.len() % WINDOW_PAIRS));
    }
    pairs.chunks(WINDOW_PAIRS).map(pack_packet).collect()
}

/// Accumulated bit transitions of one transmission.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaneStats {
    pub total_input_bt: u64,
    pub total_weight_bt: u64,
    pub flit_boundary_count: u64,
    pub packets_sent: u64,
}

impl LaneStats {
    fn avg(&self, total: u64) -> f64 {
        if self.flit_boundary_count == 0 {
            0.0
        } else {
            total as f64 / self.flit_boundary_count as f64
        }
    }

    pub fn input_avg(&self) -> f64 {
        self.avg(self.total_input_bt)
    }

    pub fn weight_avg(&self) -> f64 {
        self.avg(self.total_weight_bt)
    }

    pub fn overall_avg(&self) -> f64 {
        self.avg(self.total_input_bt + self.total_weight_bt)
    }

    pub fn total_bt(&self) -> u64 {
        self.total_input_bt + self.total_weight_bt
    }

    /// Field-wise sum of two finished transmissions.
    pub fn merge(self, other: LaneStats) -> LaneStats {
        LaneStats {
            total_input_bt: self.total_input_bt + other.total_input_bt,
            total_weight_bt: self.total_weight_bt + other.total_weight_bt,
            flit_boundary_count: self.flit_boundary_count + other.flit_boundary_count,
            packets_sent: self.packets_sent + other.packets_sent,
        }
    }
}

/// A single link that remembers its last flit, so consecutive `send` calls
/// count the boundary between them.
#[derive(Clone, Debug, Default)]
pub struct Link {
    last: Option<Flit>,
    stats: LaneStats,
}

impl Link {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn send(&mut self, packet: &Packet) {
        for flit in &packet.flits {
            if let Some(prev) = &self.last {
                let (i, w) = flit_bt(prev, flit);
                self.stats.total_input_bt += i as u64;
                self.stats.total_weight_bt += w as u64;
                self.stats.flit_boundary_count += 1;
            }
            self.last = Some(*flit);
        }
        self.stats.packets_sent += 1;
    }

    pub fn stats(&self) -> LaneStats {
        self.stats
    }
}

/// Sends `packets` as one transmission on a fresh link and adds the result
/// to `stats`. The first flit contributes no transition.
pub fn transmit(packets: &[Packet], stats: LaneStats) -> LaneStats {
    let mut link = Link::new();
    for p in packets {
        link.send(p);
    }
    stats.merge(link.stats())
}
