//! Comparison-free popcount sorting units and a bit-transition simulator
//! for a 128-bit accelerator link.
//!
//! Ordering the words sent over a link by their '1'-bit count keeps
//! neighbouring beats similar, which cuts the number of wires that toggle.
//! This crate models:
//!
//! - [`bits`]: words, flits, popcount and transition counting;
//! - [`psu`]: the three-stage counting-sort unit in accurate (9-bin) and
//!   bucket-approximate form, plus a bitonic reference network;
//! - [`link`]: packing pairs into packets, ordering strategies, and the
//!   random-traffic experiment;
//! - [`workload`]: LeNet-5 C1 + S2 tiles streamed through the link with a
//!   golden integer model;
//! - [`cost`]: a relative area model of the sort unit;
//! - [`cli`]: the experiment commands used by the `popsort` binary.
//!
//! ```
//! use popsort::bits::Word;
//! use popsort::psu::{sort_unit, BucketSpec};
//!
//! let words = [0x0F, 0x01, 0x7F, 0x1F, 0x07, 0x1F].map(Word);
//! let trace = sort_unit(&words, &BucketSpec::default()).unwrap();
//! assert_eq!(trace.keys, vec![1, 0, 3, 2, 1, 2]);
//! assert_eq!(trace.output.indices(), &[1, 0, 4, 3, 5, 2]);
//! ```

pub mod bits;
pub mod cli;
pub mod cost;
pub mod error;
pub mod link;
pub mod psu;
pub mod workload;

pub use error::{Error, Result};
