use std::process::Command;

fn popsort(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_popsort")).args(args).output().unwrap()
}

#[test]
fn table1_single_packet() {
    let out = popsort(&["table1", "--packets", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(!text.contains("NaN") && !text.contains("inf"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cost.csv");
    let out = popsort(&["cost", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("design,n,bins"));
}

#[test]
fn invalid_arguments_fail() {
    let bad_k = popsort(&["table1", "--packets", "10", "--buckets", "12"]);
    assert!(!bad_k.status.success());
    assert!(String::from_utf8_lossy(&bad_k.stderr).contains("bucket count"));
    assert!(!popsort(&["lenet", "--kernel", "6"]).status.success());
    assert!(!popsort(&["table1", "--strategy", "fastest"]).status.success());
    assert!(!popsort(&["lenet", "--image", "/nonexistent/image"]).status.success());
}

#[test]
fn sortdemo_prints_four_patterns() {
    let out = popsort(&["sortdemo"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["all-ones", "all-zeros", "descending", "random"] {
        assert!(text.contains(&format!("pattern {name} ")), "{name}");
    }
}
