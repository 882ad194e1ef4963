use std::fs::File;

use popsort::cli::{cmd_lenet, ExperimentConfig, ImagePattern};
use popsort::workload::images::{checkerboard, gradient, load_image, pseudo_random, write_blnk, write_idx};

fn lenet(cfg: ExperimentConfig) -> popsort::cli::LenetOutput {
    cmd_lenet(&cfg).unwrap()
}

#[test]
fn blnk_and_idx_inputs_stream_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let blnk = dir.path().join("img.blnk");
    write_blnk(File::create(&blnk).unwrap(), &gradient(32, 32)).unwrap();
    let idx = dir.path().join("img-ubyte");
    write_idx(File::create(&idx).unwrap(), &[pseudo_random(28, 28, 5), checkerboard(28, 28, 2)]).unwrap();

    assert_eq!(load_image(&blnk).unwrap(), gradient(32, 32));
    assert_eq!(load_image(&idx).unwrap(), pseudo_random(28, 28, 5));

    for (path, kernel, tiles) in [(&blnk, 5, 28 * 28 * 6), (&idx, 7, 22 * 22 * 6)] {
        let out = lenet(ExperimentConfig {
            image: Some(path.clone()),
            kernel,
            ..Default::default()
        });
        assert!(out.all_correct);
        let per_tile = if kernel == 5 { 1 } else { 2 };
        assert!(out.reports.iter().all(|r| r.stats.packets_sent == (tiles * per_tile) as u64));
    }
}

#[test]
fn gradient_rows_are_correct_and_dump_matches() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("layer.csv");
    let out = lenet(ExperimentConfig {
        pattern: ImagePattern::Gradient,
        dump: Some(dump.clone()),
        ..Default::default()
    });
    assert!(out.all_correct);
    for line in out.csv.lines().skip(1) {
        assert!(line.ends_with(",true"), "{line}");
    }
    let text = std::fs::read_to_string(dump).unwrap();
    assert_eq!(text.lines().count(), 1 + 6 * 14 * 14);
    let pooled = &out.reports[0].pooled;
    let last = text.lines().last().unwrap();
    assert_eq!(last, format!("5,13,13,{}", pooled[5].get(13, 13)));
}

#[test]
fn app_row_reports_retention_column() {
    let out = lenet(ExperimentConfig::default());
    let header: Vec<&str> = out.csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "retention_vs_acc").unwrap();
    let app = out.csv.lines().find(|l| l.starts_with("app,")).unwrap();
    assert!(!app.split(',').nth(col).unwrap().is_empty());
}
