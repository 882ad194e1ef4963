//! Link transitions and relative unit cost as the bucket count varies.
//!
//! cargo run --release --example bucket_sweep

use popsort::cost::{estimate_cost, reduction_pct};
use popsort::link::{run_table1, OrderingStrategy, Table1Config};
use popsort::psu::BucketSpec;
use popsort::workload::images::{pseudo_random, STANDARD_IMAGE_SEED};
use popsort::workload::{run_workload_experiment, ConvConfig, ConvWeights};

fn main() -> popsort::Result<()> {
    let config = Table1Config {
        packets: 20_000,
        ..Default::default()
    };
    let layer = ConvConfig::lenet_c1(5);
    let image = pseudo_random(32, 32, STANDARD_IMAGE_SEED);
    let weights = ConvWeights::random(&layer, 1);
    let lenet_base = run_workload_experiment(&image, &weights, &layer, &OrderingStrategy::NonOptimized, Default::default())?
        .stats
        .overall_avg();
    let acc_cost = estimate_cost(25, 9, 8)?.total;

    println!("k,random_overall_bt,random_reduction_pct,lenet_overall_bt,lenet_reduction_pct,cost_total,cost_reduction_pct");
    for k in 1..=9 {
        let strategy = OrderingStrategy::App(BucketSpec::with_buckets(k)?);
        let row = run_table1(&config, &[OrderingStrategy::NonOptimized, strategy.clone()])?.remove(1);
        let lenet = run_workload_experiment(&image, &weights, &layer, &strategy, Default::default())?
            .stats
            .overall_avg();
        let cost = estimate_cost(25, k, 8)?.total;
        println!(
            "{k},{:.3},{:.3},{lenet:.3},{:.3},{cost:.2},{:.2}",
            row.overall_avg(),
            row.reduction_pct,
            reduction_pct(lenet_base, lenet),
            reduction_pct(acc_cost, cost),
        );
    }
    Ok(())
}
