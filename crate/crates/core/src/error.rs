use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("popcount {0} outside [0, 8]")]
    CountOutOfRange(u32),
    #[error("invalid bucket boundaries {0:?}: need strictly increasing thresholds in [1, 8]")]
    InvalidBuckets(Vec<u8>),
    #[error("bucket count {0} outside [1, 9]")]
    InvalidBucketCount(usize),
    #[error("key {key} out of range for {num_bins} bins")]
    KeyOutOfRange { key: usize, num_bins: usize },
    #[error("starting addresses {starts:?} do not match the key histogram")]
    InconsistentStarts { starts: Vec<usize> },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("sort unit needs at least one element")]
    EmptyInput,
    #[error("window holds {0} pairs, expected {expected}", expected = crate::link::WINDOW_PAIRS)]
    WindowSize(usize),
    #[error("tile shape {rows}x{cols} does not cover {len} pairs")]
    TileShape { rows: usize, cols: usize, len: usize },
    #[error("invalid convolution config: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("accumulator overflow in PE {pe_id}")]
    Overflow { pe_id: usize },
    #[error("bins must satisfy 1 <= B <= W+1 (B = {bins}, W = {width})")]
    BinsOutOfRange { bins: usize, width: usize },
    #[error("image format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
