//! Replays the checked-in fuzz corpus through the config parser so every
//! seed stays panic-free under plain `cargo test`, fuzzer or no fuzzer.

use std::path::PathBuf;

use model_core::kv::KvFile;
use model_core::{BellConfig, ListenerGeometry, StringConfig};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/parse_kv_config")
}

#[test]
fn every_seed_parses_without_panicking() {
    let mut seen = 0;
    for entry in std::fs::read_dir(corpus_dir()).expect("corpus directory is checked in") {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        if let Ok(mut kv) = KvFile::parse(&text) {
            let _ = StringConfig::from_kv(&mut kv);
            let _ = kv.reject_unused();
        }
        if let Ok(mut kv) = KvFile::parse(&text) {
            let _ = BellConfig::from_kv(&mut kv);
        }
        if let Ok(mut kv) = KvFile::parse(&text) {
            let _ = ListenerGeometry::from_kv(&mut kv, 81);
        }
        seen += 1;
    }
    assert!(seen >= 6, "corpus shrank to {seen} seeds");
}

#[test]
fn the_full_string_seed_loads_cleanly() {
    let text = std::fs::read_to_string(corpus_dir().join("string_full.kv")).unwrap();
    let mut kv = KvFile::parse(&text).unwrap();
    let config = StringConfig::from_kv(&mut kv).unwrap();
    kv.reject_unused().unwrap();
    config.validate().unwrap();
    assert_eq!(config.node_count, 81);
}

#[test]
fn the_bell_seed_loads_cleanly() {
    let text = std::fs::read_to_string(corpus_dir().join("bell.kv")).unwrap();
    let mut kv = KvFile::parse(&text).unwrap();
    let config = BellConfig::from_kv(&mut kv).unwrap();
    kv.reject_unused().unwrap();
    config.validate().unwrap();
}
