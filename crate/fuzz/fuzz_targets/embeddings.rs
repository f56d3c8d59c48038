#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::blocking::read_embeddings;

fuzz_target!(|data: &[u8]| {
    let _ = read_embeddings(data);
});
