//! Property: the WAV reader never panics or overruns on arbitrary bytes; it
//! either produces a buffer or a typed error.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = acoustics_io::parse_wav(data);
});
