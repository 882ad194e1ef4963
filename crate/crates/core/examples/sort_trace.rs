//! Every stage of one accurate and one approximate sort-unit run.
//!
//! cargo run --example sort_trace

use popsort::bits::Word;
use popsort::psu::{SortTrace, SortUnit};

fn show(label: &str, words: &[Word], t: &SortTrace) {
    println!("{label}");
    println!("  words     {:02x?}", words.iter().map(|w| w.0).collect::<Vec<_>>());
    println!("  popcount  {:?}", t.popcounts);
    println!("  key       {:?}", t.keys);
    for (i, oh) in t.onehot.iter().enumerate() {
        println!("  onehot[{i}] {oh}");
    }
    println!("  histogram {:?}", t.histogram);
    println!("  prefix    {:?}", t.prefix);
    println!("  indices   {:?}", t.output.indices());
    let sorted: Vec<u8> = t.output.apply(&t.popcounts);
    println!("  sent popcounts {sorted:?}\n");
}

fn main() -> popsort::Result<()> {
    let words = [0x0F, 0x01, 0x7F, 0x1F, 0x07, 0x3E, 0xFF, 0x00].map(Word);
    show("ACC (9 bins)", &words, &SortUnit::accurate().run(&words)?);
    show("APP (4 buckets)", &words, &SortUnit::default().run(&words)?);
    Ok(())
}
