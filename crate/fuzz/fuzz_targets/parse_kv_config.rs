//! Property: config parsing never panics, whatever the bytes. Errors are
//! fine; crashes are findings.

#![no_main]

use libfuzzer_sys::fuzz_target;
use model_core::kv::KvFile;
use model_core::{BellConfig, ListenerGeometry, StringConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mut kv) = KvFile::parse(text) {
        let _ = StringConfig::from_kv(&mut kv);
        let _ = kv.reject_unused();
    }
    if let Ok(mut kv) = KvFile::parse(text) {
        let _ = BellConfig::from_kv(&mut kv);
    }
    if let Ok(mut kv) = KvFile::parse(text) {
        let _ = ListenerGeometry::from_kv(&mut kv, 81);
    }
});
