//! LeNet-5 C1 + S2 streamed through the link for each test image, kernel
//! size and ordering strategy, with the golden-model check.
//!
//! cargo run --release --example lenet_workload

use popsort::link::OrderingStrategy;
use popsort::psu::{BucketSpec, SortOrder};
use popsort::workload::images::standard_images;
use popsort::workload::{run_workload_experiment, ConvConfig, ConvWeights};

fn main() -> popsort::Result<()> {
    println!("image,kernel,strategy,packets,input_bt,weight_bt,overall_bt,bit_exact");
    for kernel in [5, 7] {
        let config = ConvConfig::lenet_c1(kernel);
        let weights = ConvWeights::random(&config, 1);
        for (name, image) in standard_images(32, 32) {
            for strategy in OrderingStrategy::all(BucketSpec::default()) {
                let r = run_workload_experiment(&image, &weights, &config, &strategy, SortOrder::Ascending)?;
                println!(
                    "{name},{kernel},{strategy},{},{:.3},{:.3},{:.3},{}",
                    r.stats.packets_sent,
                    r.stats.input_avg(),
                    r.stats.weight_avg(),
                    r.stats.overall_avg(),
                    r.correct
                );
            }
        }
    }
    Ok(())
}
