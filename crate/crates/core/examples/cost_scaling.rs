//! Relative area of the counting-sort unit against bucket count, and of a
//! bitonic network on the same keys.
//!
//! cargo run --example cost_scaling

use popsort::cost::{reduction_pct, CostModel};

fn main() -> popsort::Result<()> {
    let model = CostModel::default();
    for n in [25, 49] {
        let acc = model.estimate(n, 9, 8)?;
        println!("n = {n}");
        println!("  bins  popcount     sort    total  sort_red%  total_red%");
        for bins in 1..=9 {
            let r = model.estimate(n, bins, 8)?;
            println!(
                "  {bins:>4} {:>9.2} {:>8.2} {:>8.2} {:>10.2} {:>11.2}",
                r.popcount_units,
                r.sort_units,
                r.total,
                reduction_pct(acc.sort_units, r.sort_units),
                reduction_pct(acc.total, r.total)
            );
        }
        let bitonic = model.estimate_bitonic(n, 9, 8)?;
        println!("  bitonic total {:.2} ({})\n", bitonic.total, bitonic.to_json());
    }
    Ok(())
}
