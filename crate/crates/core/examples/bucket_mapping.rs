//! Popcount-to-bucket mappings for every bucket count.
//!
//! cargo run --example bucket_mapping

use popsort::psu::{bucket_map, BucketSpec};

fn main() -> popsort::Result<()> {
    for k in 1..=9 {
        let spec = BucketSpec::with_buckets(k)?;
        let row: Vec<String> = (0..=8)
            .map(|c| bucket_map(c, &spec).map(|b| b.to_string()))
            .collect::<Result<_, _>>()?;
        println!(
            "k={k} ({} index bits) {:<40} counts 0..8 -> {}",
            spec.index_bits(),
            spec.to_string(),
            row.join(" ")
        );
    }

    let spec = BucketSpec::default();
    let counts = [4, 1, 7, 5, 3, 5];
    let buckets: Vec<usize> = counts
        .iter()
        .map(|&c| bucket_map(c, &spec))
        .collect::<Result<_, _>>()?;
    println!("\ndefault spec {spec}: counts {counts:?} -> buckets {buckets:?}");
    Ok(())
}
