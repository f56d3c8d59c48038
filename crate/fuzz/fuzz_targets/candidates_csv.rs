#![no_main]

use libfuzzer_sys::fuzz_target;
use matchwork_core::CandidateSet;

fuzz_target!(|data: &[u8]| {
    let Ok(set) = CandidateSet::read(data) else { return };
    let mut out = Vec::new();
    set.write(&mut out).unwrap();
    let again = CandidateSet::read(out.as_slice()).unwrap();
    assert_eq!(again.fingerprint(), set.fingerprint());
});
