//! Bitonic network size against the counting-sort unit, and a check that
//! both produce the same key order.
//!
//! cargo run --example bitonic_reference

use popsort::bits::{popcount, Word};
use popsort::psu::{batcher_comparator_count, bitonic_sort, sort_unit, BucketSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> popsort::Result<()> {
    println!("n,comparators");
    for n in [2, 4, 8, 16, 25, 32, 49, 64] {
        println!("{n},{}", batcher_comparator_count(n));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let words: Vec<Word> = (0..32).map(|_| Word(rng.random())).collect();
    let keys: Vec<u32> = words.iter().map(|&w| popcount(w) as u32).collect();
    let (bitonic, fired) = bitonic_sort(&keys);
    let trace = sort_unit(&words, &BucketSpec::exact())?;
    let counting: Vec<u32> = trace.output.apply(&keys);
    assert_eq!(bitonic, counting);
    println!("\n32 random words: bitonic fired {fired} comparators, counting sort used {} bins", trace.num_bins());
    println!("sorted popcounts {counting:?}");
    Ok(())
}
