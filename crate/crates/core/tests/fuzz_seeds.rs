//! Replays the checked-in fuzz corpus through each parser.

use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn config_seeds() {
    for (name, bytes) in seeds("parse_config") {
        let parsed = qdot::io::parse_config(std::str::from_utf8(&bytes).unwrap());
        match name.as_str() {
            "unknown_key.cfg" => assert!(parsed.is_err()),
            "dimension_only.cfg" => assert!(parsed.unwrap().resolve().is_err()),
            _ => assert!(parsed.unwrap().resolve().is_ok(), "{name}"),
        }
    }
}

#[test]
fn grid_seeds() {
    for (name, bytes) in seeds("parse_grid") {
        let parsed = qdot::io::parse_grid(std::str::from_utf8(&bytes).unwrap());
        match name.as_str() {
            "reversed" | "huge" => assert!(parsed.is_err(), "{name}"),
            _ => assert!(parsed.is_ok(), "{name}"),
        }
    }
}

#[test]
fn curve_seeds() {
    for (name, bytes) in seeds("parse_curve_csv") {
        let parsed = qdot::io::read_curve_csv(bytes.as_slice());
        assert_eq!(parsed.is_ok(), matches!(name.as_str(), "small.csv" | "header_only.csv"), "{name}");
    }
}
