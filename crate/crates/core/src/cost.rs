//! Relative area model of the sorting unit.
//!
//! Costs are unitless. The sort datapath is dominated by terms that grow
//! with the bin count `B` (one-hot lanes, histogram counters, prefix adders,
//! bin-index routing); the output index registers do not depend on `B`.
//! The popcount stage costs two nibble LUTs and one adder per 8-bit
//! element, discounted when fewer than `W + 1` bins let synthesis drop the
//! logic that only distinguishes counts inside one bucket.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psu::{batcher_comparator_count, ceil_log2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostCoefficients {
    /// One 4-bit popcount LUT.
    pub lut: f64,
    /// One adder combining LUT outputs.
    pub adder: f64,
    /// Fraction of popcount logic removed under bucket approximation.
    pub lut_discount: f64,
    /// Per one-hot lane bit (n * B).
    pub onehot: f64,
    /// Per histogram bin.
    pub histogram: f64,
    /// Per prefix-sum adder.
    pub prefix: f64,
    /// Per bin-index routing bit (n * ceil(log2 B)).
    pub routing: f64,
    /// Per output index register bit (n * ceil(log2 n)).
    pub index: f64,
    /// Per key bit of one compare-exchange, for the bitonic proxy.
    pub comparator: f64,
}

impl Default for CostCoefficients {
    fn default() -> Self {
        CostCoefficients {
            lut: 1.0,
            adder: 1.0,
            lut_discount: 0.25,
            onehot: 1.0,
            histogram: 1.0,
            prefix: 1.0,
            routing: 1.0,
            index: 1.0,
            comparator: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub popcount_units: f64,
    pub sort_units: f64,
    pub total: f64,
    pub n: usize,
    pub bins: usize,
    pub word_width: usize,
}

impl CostReport {
    fn new(popcount_units: f64, sort_units: f64, n: usize, bins: usize, word_width: usize) -> Self {
        CostReport {
            popcount_units,
            sort_units,
            total: popcount_units + sort_units,
            n,
            bins,
            word_width,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

/// Percentage by which `smaller` undercuts `base`.
pub fn reduction_pct(base: f64, smaller: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (base - smaller) / base * 100.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CostModel {
    pub coeffs: CostCoefficients,
}

impl CostModel {
    pub fn new(coeffs: CostCoefficients) -> Self {
        CostModel { coeffs }
    }

    fn check(n: usize, bins: usize, width: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if bins == 0 || bins > width + 1 {
            return Err(Error::BinsOutOfRange { bins, width });
        }
        Ok(())
    }

    fn popcount_units(&self, n: usize, bins: usize, width: usize) -> f64 {
        let c = &self.coeffs;
        let luts = width.div_ceil(4);
        let per_element = c.lut * luts as f64 + c.adder * luts.saturating_sub(1) as f64;
        let discount = if bins < width + 1 { c.lut_discount } else { 0.0 };
        n as f64 * per_element * (1.0 - discount)
    }

    fn index_units(&self, n: usize) -> f64 {
        self.coeffs.index * (n as u64 * ceil_log2(n) as u64) as f64
    }

    /// Counting-sort unit for `n` elements of `width` bits sorted into
    /// `bins` bins.
    pub fn estimate(&self, n: usize, bins: usize, width: usize) -> Result<CostReport> {
        Self::check(n, bins, width)?;
        let c = &self.coeffs;
        let (nf, bf) = (n as f64, bins as f64);
        let sort = c.onehot * nf * bf
            + c.histogram * bf
            + c.prefix * bf
            + c.routing * nf * ceil_log2(bins) as f64
            + self.index_units(n);
        Ok(CostReport::new(self.popcount_units(n, bins, width), sort, n, bins, width))
    }

    /// Bitonic-network unit on the same keys: one compare-exchange per
    /// network comparator, each as wide as the bin index.
    pub fn estimate_bitonic(&self, n: usize, bins: usize, width: usize) -> Result<CostReport> {
        Self::check(n, bins, width)?;
        let comparators = batcher_comparator_count(n) as f64;
        let sort = self.coeffs.comparator * comparators * ceil_log2(bins) as f64 + self.index_units(n);
        Ok(CostReport::new(self.popcount_units(n, bins, width), sort, n, bins, width))
    }
}

/// [`CostModel::estimate`] with default coefficients.
pub fn estimate_cost(n: usize, bins: usize, width: usize) -> Result<CostReport> {
    CostModel::default().estimate(n, bins, width)
}
