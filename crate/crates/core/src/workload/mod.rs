//! LeNet-5 C1 convolution + S2 pooling as a link workload.
//!
//! Every (output pixel, filter) window becomes one [`Tile`] of
//! (activation, weight) pairs. Tiles are ordered, packetized and sent over
//! one link; the receiving PE accumulates the pairs in arrival order. The
//! streamed result is compared bit-for-bit with a golden model that never
//! reorders anything.
//!
//! Arithmetic: activations are unsigned 8-bit, weights signed 8-bit
//! two's-complement, accumulators signed 32-bit. Pooling is 2x2 average
//! pooling with truncating division.

pub mod images;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Word;
use crate::error::{Error, Result};
use crate::link::{order_stream, packetize, unpack_packet, LaneStats, Link, OrderingStrategy, Pair, PairStream};
use crate::psu::SortOrder;

/// Number of modeled processing elements.
pub const NUM_PES: usize = 16;

/// Row-major 2-D array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} grid given {} values",
                data.len()
            )));
        }
        Ok(Grid { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let data = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Grid { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvConfig {
    pub input_h: usize,
    pub input_w: usize,
    pub kernel: usize,
    pub num_filters: usize,
    pub stride: usize,
}

impl ConvConfig {
    /// LeNet-5 C1 on a 32x32 input with 6 filters.
    pub fn lenet_c1(kernel: usize) -> Self {
        ConvConfig {
            input_h: 32,
            input_w: 32,
            kernel,
            num_filters: 6,
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.kernel.is_multiple_of(2) {
            return bad(format!("kernel {} must be odd", self.kernel));
        }
        if self.kernel > self.input_h.min(self.input_w) {
            return bad(format!(
                "kernel {} larger than input {}x{}",
                self.kernel, self.input_h, self.input_w
            ));
        }
        if self.stride != 1 {
            return bad(format!("stride {} unsupported, must be 1", self.stride));
        }
        if self.num_filters == 0 {
            return bad("need at least one filter".into());
        }
        Ok(())
    }

    pub fn output_dims(&self) -> (usize, usize) {
        (
            (self.input_h - self.kernel) / self.stride + 1,
            (self.input_w - self.kernel) / self.stride + 1,
        )
    }
}

/// Kernels and per-filter bias of one convolution layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvWeights {
    pub kernels: Vec<Grid<i8>>,
    pub biases: Vec<i32>,
}

impl ConvWeights {
    /// Uniform random signed 8-bit kernels, zero bias.
    pub fn random(config: &ConvConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kernels = (0..config.num_filters)
            .map(|_| Grid::from_fn(config.kernel, config.kernel, |_, _| rng.random::<i8>()))
            .collect();
        ConvWeights {
            kernels,
            biases: vec![0; config.num_filters],
        }
    }

    fn check(&self, config: &ConvConfig) -> Result<()> {
        if self.kernels.len() != config.num_filters || self.biases.len() != config.num_filters {
            return Err(Error::Dimension(format!(
                "{} kernels / {} biases for {} filters",
                self.kernels.len(),
                self.biases.len(),
                config.num_filters
            )));
        }
        if let Some(k) = self
            .kernels
            .iter()
            .find(|k| k.rows() != config.kernel || k.cols() != config.kernel)
        {
            return Err(Error::Dimension(format!(
                "kernel is {}x{}, config says {}",
                k.rows(),
                k.cols(),
                config.kernel
            )));
        }
        Ok(())
    }
}

fn check_image(image: &Grid<u8>, config: &ConvConfig) -> Result<()> {
    if (image.rows(), image.cols()) != (config.input_h, config.input_w) {
        return Err(Error::Dimension(format!(
            "image is {}x{}, config says {}x{}",
            image.rows(),
            image.cols(),
            config.input_h,
            config.input_w
        )));
    }
    Ok(())
}

/// Valid cross-correlation plus bias, one output map per filter.
pub fn golden_conv(image: &Grid<u8>, weights: &ConvWeights, config: &ConvConfig) -> Result<Vec<Grid<i32>>> {
    config.validate()?;
    check_image(image, config)?;
    weights.check(config)?;
    let (oh, ow) = config.output_dims();
    let k = config.kernel;
    weights
        .kernels
        .iter()
        .zip(&weights.biases)
        .enumerate()
        .map(|(f, (kernel, &bias))| {
            let mut out = Grid::from_fn(oh, ow, |_, _| 0i32);
            for r in 0..oh {
                for c in 0..ow {
                    let mut acc = bias;
                    for kr in 0..k {
                        for kc in 0..k {
                            let x = *image.get(r * config.stride + kr, c * config.stride + kc) as i32;
                            let w = *kernel.get(kr, kc) as i32;
                            acc = acc.checked_add(x * w).ok_or(Error::Overflow { pe_id: f })?;
                        }
                    }
                    out.set(r, c, acc);
                }
            }
            Ok(out)
        })
        .collect()
}

/// Non-overlapping `window` x `window` average pooling, truncating.
pub fn golden_pool(map: &Grid<i32>, window: usize) -> Result<Grid<i32>> {
    if window == 0 || !map.rows().is_multiple_of(window) || !map.cols().is_multiple_of(window) {
        return Err(Error::Dimension(format!(
            "{}x{} map not divisible by pool window {window}",
            map.rows(),
            map.cols()
        )));
    }
    let area = (window * window) as i64;
    Ok(Grid::from_fn(map.rows() / window, map.cols() / window, |r, c| {
        let sum: i64 = (0..window)
            .flat_map(|dr| (0..window).map(move |dc| (dr, dc)))
            .map(|(dr, dc)| *map.get(r * window + dr, c * window + dc) as i64)
            .sum();
        (sum / area) as i32
    }))
}

/// The pairs of one conv window for one filter, in row-major kernel order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub pairs: Vec<Pair>,
    pub kernel: usize,
    pub pe_id: usize,
    pub filter: usize,
    pub out_row: usize,
    pub out_col: usize,
}

impl Tile {
    pub fn stream(&self) -> PairStream {
        PairStream::new(self.pairs.clone(), Some((self.kernel, self.kernel)))
            .expect("tile pairs match kernel shape")
    }
}

/// One tile per (output pixel, filter), enumerated output-row-major with
/// the filter index innermost; tile `i` goes to PE `i % 16`.
pub fn generate_tiles(image: &Grid<u8>, weights: &ConvWeights, config: &ConvConfig) -> Result<Vec<Tile>> {
    config.validate()?;
    check_image(image, config)?;
    weights.check(config)?;
    let (oh, ow) = config.output_dims();
    let k = config.kernel;
    let mut tiles = Vec::with_capacity(oh * ow * config.num_filters);
    for r in 0..oh {
        for c in 0..ow {
            for (f, kernel) in weights.kernels.iter().enumerate() {
                let pairs = (0..k * k)
                    .map(|i| {
                        let (kr, kc) = (i / k, i % k);
                        Pair {
                            input: Word(*image.get(r * config.stride + kr, c * config.stride + kc)),
                            weight: Word::from_i8(*kernel.get(kr, kc)),
                        }
                    })
                    .collect();
                tiles.push(Tile {
                    pairs,
                    kernel: k,
                    pe_id: tiles.len() % NUM_PES,
                    filter: f,
                    out_row: r,
                    out_col: c,
                });
            }
        }
    }
    Ok(tiles)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeResult {
    pub accumulator: i32,
    pub pe_id: usize,
}

/// Multiply-accumulate over the pairs in the order received.
pub fn pe_accumulate(pe_id: usize, pairs: &[Pair]) -> Result<PeResult> {
    let mut acc = 0i32;
    for p in pairs {
        let product = p.input.0 as i32 * p.weight.as_i8() as i32;
        acc = acc.checked_add(product).ok_or(Error::Overflow { pe_id })?;
    }
    Ok(PeResult {
        accumulator: acc,
        pe_id,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkloadReport {
    pub strategy: String,
    pub stats: LaneStats,
    pub conv: Vec<Grid<i32>>,
    pub pooled: Vec<Grid<i32>>,
    /// Streamed output equals the golden output bit for bit.
    pub correct: bool,
}

/// Streams every tile of the layer through one link under `strategy` and
/// checks the PE results against the golden model.
pub fn run_workload_experiment(
    image: &Grid<u8>,
    weights: &ConvWeights,
    config: &ConvConfig,
    strategy: &OrderingStrategy,
    order: SortOrder,
) -> Result<WorkloadReport> {
    let golden: Vec<Grid<i32>> = golden_conv(image, weights, config)?
        .iter()
        .map(|m| golden_pool(m, 2))
        .collect::<Result<_>>()?;

    let (oh, ow) = config.output_dims();
    let mut conv: Vec<Grid<i32>> = (0..config.num_filters)
        .map(|_| Grid::from_fn(oh, ow, |_, _| 0))
        .collect();
    let mut link = Link::new();
    for tile in generate_tiles(image, weights, config)? {
        let ordered = order_stream(&tile.stream(), strategy, order)?;
        let mut received = Vec::with_capacity(ordered.len());
        for packet in packetize(&ordered)? {
            link.send(&packet);
            received.extend(unpack_packet(&packet));
        }
        let result = pe_accumulate(tile.pe_id, &received)?;
        let value = result
            .accumulator
            .checked_add(weights.biases[tile.filter])
            .ok_or(Error::Overflow { pe_id: tile.pe_id })?;
        conv[tile.filter].set(tile.out_row, tile.out_col, value);
    }
    let pooled = conv.iter().map(|m| golden_pool(m, 2)).collect::<Result<Vec<_>>>()?;
    Ok(WorkloadReport {
        strategy: strategy.name().to_string(),
        stats: link.stats(),
        correct: pooled == golden,
        conv,
        pooled,
    })
}

/// Writes `filter,row,col,value` rows for every element of `maps`.
pub fn write_layer_csv<W: Write>(maps: &[Grid<i32>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["filter", "row", "col", "value"])?;
    for (f, m) in maps.iter().enumerate() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                w.write_record([f.to_string(), r.to_string(), c.to_string(), m.get(r, c).to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn naive_conv(image: &Grid<u8>, kernel: &Grid<i8>, bias: i32) -> Grid<i32> {
        let k = kernel.rows();
        let oh = image.rows() - k + 1;
        let ow = image.cols() - k + 1;
        let mut out = vec![vec![0i64; ow]; oh];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                for kr in 0..k {
                    for kc in 0..k {
                        *v += image.data()[(r + kr) * image.cols() + c + kc] as i64
                            * kernel.data()[kr * k + kc] as i64;
                    }
                }
                *v += bias as i64;
            }
        }
        Grid::from_fn(oh, ow, |r, c| out[r][c] as i32)
    }

    fn single_filter(kernel: Grid<i8>) -> ConvWeights {
        ConvWeights {
            kernels: vec![kernel],
            biases: vec![0],
        }
    }

    fn config(h: usize, w: usize, k: usize, filters: usize) -> ConvConfig {
        ConvConfig {
            input_h: h,
            input_w: w,
            kernel: k,
            num_filters: filters,
            stride: 1,
        }
    }

    #[test]
    fn identity_kernel() {
        let img = images::pseudo_random(6, 5, 4);
        let weights = single_filter(Grid::new(1, 1, vec![1]).unwrap());
        let out = golden_conv(&img, &weights, &config(6, 5, 1, 1)).unwrap();
        assert_eq!(out[0].data(), img.data().iter().map(|&v| v as i32).collect::<Vec<_>>());
    }

    #[test]
    fn zero_image() {
        let img = Grid::from_fn(8, 8, |_, _| 0u8);
        let cfg = config(8, 8, 3, 2);
        let out = golden_conv(&img, &ConvWeights::random(&cfg, 1), &cfg).unwrap();
        assert!(out.iter().all(|m| m.data().iter().all(|&v| v == 0)));
    }

    #[test]
    fn conv_matches_naive_oracle() {
        let img = images::pseudo_random(8, 8, 11);
        let cfg = config(8, 8, 3, 3);
        let mut weights = ConvWeights::random(&cfg, 12);
        weights.biases = vec![-7, 0, 300];
        let out = golden_conv(&img, &weights, &cfg).unwrap();
        for (f, m) in out.iter().enumerate() {
            assert_eq!(*m, naive_conv(&img, &weights.kernels[f], weights.biases[f]));
        }
    }

    #[test]
    fn conv_rejects_mismatch() {
        let img = images::gradient(8, 8);
        let cfg = config(8, 8, 3, 1);
        let weights = ConvWeights::random(&config(8, 8, 5, 1), 1);
        assert!(matches!(golden_conv(&img, &weights, &cfg), Err(Error::Dimension(_))));
        assert!(golden_conv(&images::gradient(7, 8), &ConvWeights::random(&cfg, 1), &cfg).is_err());
        assert!(config(8, 8, 4, 1).validate().is_err());
        assert!(config(4, 8, 5, 1).validate().is_err());
    }

    #[test]
    fn pool_examples() {
        let constant = Grid::from_fn(4, 6, |_, _| -9);
        assert_eq!(golden_pool(&constant, 2).unwrap(), Grid::from_fn(2, 3, |_, _| -9));
        let block = Grid::new(2, 2, vec![0, 1, 2, 3]).unwrap();
        assert_eq!(golden_pool(&block, 2).unwrap().data(), &[1]);
        // truncation is toward zero for negative sums
        let neg = Grid::new(2, 2, vec![0, -1, -2, -3]).unwrap();
        assert_eq!(golden_pool(&neg, 2).unwrap().data(), &[-1]);
        assert!(golden_pool(&Grid::from_fn(3, 4, |_, _| 0), 2).is_err());
    }

    #[test]
    fn pool_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let map = Grid::from_fn(4, 4, |_, _| rng.random_range(-10_000..10_000));
        let pooled = golden_pool(&map, 2).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let s = map.get(2 * r, 2 * c) + map.get(2 * r, 2 * c + 1)
                    + map.get(2 * r + 1, 2 * c)
                    + map.get(2 * r + 1, 2 * c + 1);
                assert_eq!(*pooled.get(r, c), s / 4);
            }
        }
    }

    #[test]
    fn tile_counts() {
        let one = config(5, 5, 5, 1);
        let tiles = generate_tiles(&images::gradient(5, 5), &ConvWeights::random(&one, 1), &one).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(tiles[0].pe_id, 0);

        let four = config(6, 6, 5, 1);
        let tiles = generate_tiles(&images::gradient(6, 6), &ConvWeights::random(&four, 1), &four).unwrap();
        assert_eq!(tiles.iter().map(|t| t.pe_id).collect::<Vec<_>>(), vec![0, 1, 2, 3]);

        let c1 = ConvConfig::lenet_c1(5);
        let tiles = generate_tiles(&images::gradient(32, 32), &ConvWeights::random(&c1, 1), &c1).unwrap();
        assert_eq!(tiles.len(), 28 * 28 * 6);
        assert!(tiles.iter().all(|t| t.pairs.len() == 25 && t.pe_id < NUM_PES));
    }

    #[test]
    fn tiles_cover_every_window_once() {
        let cfg = ConvConfig::lenet_c1(7);
        let tiles = generate_tiles(&images::gradient(32, 32), &ConvWeights::random(&cfg, 2), &cfg).unwrap();
        let mut seen = std::collections::HashSet::new();
        for t in &tiles {
            assert!(seen.insert((t.filter, t.out_row, t.out_col)));
        }
        assert_eq!(seen.len(), 26 * 26 * 6);
    }

    #[test]
    fn tile_pairs_are_window_and_kernel() {
        let cfg = config(6, 6, 3, 2);
        let img = images::pseudo_random(6, 6, 8);
        let weights = ConvWeights::random(&cfg, 9);
        let tiles = generate_tiles(&img, &weights, &cfg).unwrap();
        let t = &tiles[2 * (4 + 1) + 1]; // row 1, col 1, filter 1
        assert_eq!((t.out_row, t.out_col, t.filter), (1, 1, 1));
        let acc = pe_accumulate(t.pe_id, &t.pairs).unwrap().accumulator;
        assert_eq!(acc, *golden_conv(&img, &weights, &cfg).unwrap()[1].get(1, 1));
    }

    #[test]
    fn accumulate_examples() {
        assert_eq!(pe_accumulate(0, &[]).unwrap().accumulator, 0);
        let a = [Pair::new(2, 3), Pair::new(4, 5)];
        let b = [a[1], a[0]];
        assert_eq!(pe_accumulate(0, &a).unwrap().accumulator, 26);
        assert_eq!(pe_accumulate(0, &b).unwrap().accumulator, 26);
        // 0xFF weight is -1
        assert_eq!(pe_accumulate(3, &[Pair::new(10, 0xFF)]).unwrap().accumulator, -10);
    }

    #[test]
    fn accumulate_overflow_is_an_error() {
        // 255 * -128 = -32640 per pair; 70000 pairs exceed i32::MIN
        let pairs = vec![Pair::new(255, 0x80); 70_000];
        assert!(matches!(pe_accumulate(5, &pairs), Err(Error::Overflow { pe_id: 5 })));
    }

    #[test]
    fn small_layer_streams_correctly() {
        let cfg = config(12, 12, 5, 2);
        let img = images::pseudo_random(12, 12, 1);
        let weights = ConvWeights::random(&cfg, 2);
        for s in OrderingStrategy::all(Default::default()) {
            let report = run_workload_experiment(&img, &weights, &cfg, &s, SortOrder::Ascending).unwrap();
            assert!(report.correct, "{s}");
            assert_eq!(report.stats.packets_sent, 8 * 8 * 2);
        }
    }

    #[test]
    fn layer_csv() {
        let maps = vec![Grid::new(1, 2, vec![5, -6]).unwrap()];
        let mut buf = Vec::new();
        write_layer_csv(&maps, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "filter,row,col,value\n0,0,0,5\n0,0,1,-6\n");
    }

    proptest! {
        #[test]
        fn accumulation_is_order_invariant(
            raw in prop::collection::vec((any::<u8>(), any::<u8>()), 25),
            seed: u64,
        ) {
            use rand::seq::SliceRandom;
            let pairs: Vec<Pair> = raw.iter().map(|&(a, b)| Pair::new(a, b)).collect();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(
                pe_accumulate(0, &pairs).unwrap().accumulator,
                pe_accumulate(0, &shuffled).unwrap().accumulator
            );
        }
    }
}
